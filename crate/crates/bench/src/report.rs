use std::fmt::Write;

use crate::run::BenchRecord;
use crate::spec::OutputFormat;

pub const CSV_HEADER: &str = "problem,optimizer,d,n,runs,mean_seconds,final_objective_mean";

/// Renders records in spec order. Floating-point fields use Rust's shortest
/// round-trip formatting.
pub fn emit_report(records: &[BenchRecord], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => csv(records),
        OutputFormat::Markdown => markdown(records),
    }
}

fn csv(records: &[BenchRecord]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let s = &r.spec;
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.problem,
            s.optimizer,
            s.d,
            s.n,
            s.runs,
            r.mean_seconds,
            r.final_objective_mean()
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// One row per (problem, optimizer) and one column per dataset size, each
/// cell holding the mean runtime in seconds.
fn markdown(records: &[BenchRecord]) -> String {
    let mut sizes: Vec<(usize, usize)> = Vec::new();
    let mut rows: Vec<(String, String)> = Vec::new();
    for r in records {
        let size = (r.spec.d, r.spec.n);
        if !sizes.contains(&size) {
            sizes.push(size);
        }
        let row = (r.spec.problem.to_string(), r.spec.optimizer.to_string());
        if !rows.contains(&row) {
            rows.push(row);
        }
    }

    let mut out = String::from("| problem | optimizer |");
    for (d, n) in &sizes {
        write!(out, " d: {d}, n: {n} |").unwrap();
    }
    out.push_str("\n|---|---|");
    for _ in &sizes {
        out.push_str("---|");
    }
    out.push('\n');
    for (problem, optimizer) in &rows {
        write!(out, "| {problem} | {optimizer} |").unwrap();
        for &(d, n) in &sizes {
            let cell = records.iter().find(|r| {
                r.spec.problem.name() == problem
                    && r.spec.optimizer.name() == optimizer
                    && (r.spec.d, r.spec.n) == (d, n)
            });
            match cell {
                Some(r) => write!(out, " {}s |", r.mean_seconds).unwrap(),
                None => out.push_str(" - |"),
            }
        }
        out.push('\n');
    }
    out
}
