use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use optkit_bench::{
    emit_report, parse_optimizer_list, run_bench_with, BenchSpec, MonotonicClock, OptimizerKind,
    OutputFormat, Overrides, Problem, DEFAULT_GRID,
};

const USAGE_ERROR: u8 = 1;
const RUNTIME_ERROR: u8 = 2;

/// Times optkit optimizers on generated or CSV regression problems.
#[derive(Debug, Parser)]
#[command(name = "bench", version)]
struct Cli {
    /// Objective to optimize: linear or logistic.
    #[arg(long, default_value = "linear", value_parser = parse_with::<Problem>)]
    problem: Problem,

    /// Number of features. Without --d and --n a default size grid is run.
    #[arg(long)]
    d: Option<usize>,

    /// Number of samples.
    #[arg(long)]
    n: Option<usize>,

    /// CSV file (one sample per row, label last) used instead of generated data.
    #[arg(long)]
    dataset: Option<PathBuf>,

    /// Comma-separated list of lbfgs, gd, sgd, sgd-momentum, adam, sa.
    #[arg(long, default_value = "lbfgs")]
    optimizer: String,

    #[arg(long, default_value_t = 10)]
    max_iterations: usize,

    #[arg(long, default_value_t = 5)]
    runs: usize,

    /// Base seed; run k uses seed + k.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Standard deviation of the Gaussian response noise.
    #[arg(long, default_value_t = 10.0)]
    noise: f64,

    /// Step size for gd and the SGD family.
    #[arg(long)]
    step_size: Option<f64>,

    /// Mini-batch size for the SGD family.
    #[arg(long)]
    batch_size: Option<usize>,

    /// Report format: csv or markdown.
    #[arg(long, default_value = "csv", value_parser = parse_with::<OutputFormat>)]
    format: OutputFormat,

    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Print one line per run to standard error.
    #[arg(long)]
    verbose: bool,
}

fn parse_with<T: std::str::FromStr>(s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e: T::Err| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => USAGE_ERROR,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("bench: {message}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    let usage = |m: String| (USAGE_ERROR, m);
    let grid: Vec<(usize, usize)> = match (cli.d, cli.n, &cli.dataset) {
        (_, _, Some(_)) => vec![(0, 0)],
        (Some(d), Some(n), None) => vec![(d, n)],
        (None, None, None) => DEFAULT_GRID.to_vec(),
        _ => return Err(usage("--d and --n must be given together".into())),
    };
    let optimizers: Vec<OptimizerKind> =
        parse_optimizer_list(&cli.optimizer).map_err(|e| usage(e.to_string()))?;

    let specs: Vec<BenchSpec> = grid
        .iter()
        .flat_map(|&(d, n)| {
            let cli = &cli;
            optimizers.iter().map(move |&optimizer| BenchSpec {
                problem: cli.problem,
                d,
                n,
                dataset: cli.dataset.clone(),
                optimizer,
                overrides: Overrides {
                    step_size: cli.step_size,
                    batch_size: cli.batch_size,
                },
                runs: cli.runs,
                max_iterations: cli.max_iterations,
                seed: cli.seed,
                noise_scale: cli.noise,
            })
        })
        .collect();
    for spec in &specs {
        spec.validate().map_err(|e| usage(e.to_string()))?;
    }

    let mut clock = MonotonicClock::default();
    let mut records = Vec::with_capacity(specs.len());
    for spec in &specs {
        let mut log = |o: &optkit_bench::RunOutcome| {
            if cli.verbose {
                eprintln!(
                    "problem={} optimizer={} d={} n={} run={} seconds={} iterations={} termination={} f={}",
                    spec.problem,
                    spec.optimizer,
                    spec.d,
                    spec.n,
                    o.run,
                    o.seconds,
                    o.iterations,
                    o.termination,
                    o.final_objective
                );
            }
        };
        let record = run_bench_with(spec, &mut clock, &mut log)
            .map_err(|e| (RUNTIME_ERROR, e.to_string()))?;
        records.push(record);
    }

    let report = emit_report(&records, cli.format);
    match &cli.out {
        Some(path) => fs::write(path, report)
            .map_err(|e| (RUNTIME_ERROR, format!("--out {}: {e}", path.display()))),
        None => {
            print!("{report}");
            Ok(())
        }
    }
}
