use std::io::Write;
use std::process::{Command, Output};

use optkit_bench::CSV_HEADER;
use tempfile::NamedTempFile;

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bench"))
        .args(args)
        .output()
        .unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn small_run_prints_csv() {
    let out = bench(&["--d", "3", "--n", "30", "--runs", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert!(lines[1].starts_with("linear,lbfgs,3,30,2,"), "{}", lines[1]);
}

#[test]
fn optimizer_list_gives_one_row_each() {
    let out = bench(&[
        "--problem",
        "logistic",
        "--d",
        "3",
        "--n",
        "40",
        "--runs",
        "1",
        "--optimizer",
        "lbfgs,gd,sgd,sgd-momentum,adam,sa",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = stdout
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(names, ["lbfgs", "gd", "sgd", "sgd-momentum", "adam", "sa"]);
}

#[test]
fn markdown_to_file() {
    let target = NamedTempFile::new().unwrap();
    let out = bench(&[
        "--d",
        "2",
        "--n",
        "20",
        "--runs",
        "1",
        "--format",
        "markdown",
        "--out",
        target.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let table = std::fs::read_to_string(target.path()).unwrap();
    assert!(
        table.starts_with("| problem | optimizer | d: 2, n: 20 |"),
        "{table}"
    );
    assert!(table.contains("| linear | lbfgs |"));
}

#[test]
fn verbose_writes_one_line_per_run() {
    let out = bench(&["--d", "2", "--n", "20", "--runs", "3", "--verbose"]);
    assert_eq!(out.status.code(), Some(0));
    let runs = stderr(&out)
        .lines()
        .filter(|l| l.starts_with("problem=linear optimizer=lbfgs"))
        .count();
    assert_eq!(runs, 3);
}

#[test]
fn dataset_run_reports_file_shape() {
    let mut file = NamedTempFile::new().unwrap();
    writeln!(file, "a,b,label").unwrap();
    for i in 0..25 {
        let x = i as f64 / 25.0;
        writeln!(file, "{x},{},{}", 1.0 - x, (i % 2) as f64).unwrap();
    }
    let out = bench(&[
        "--problem",
        "logistic",
        "--dataset",
        file.path().to_str().unwrap(),
        "--runs",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("logistic,lbfgs,2,25,2,"),
        "{stdout}"
    );
}

#[test]
fn usage_errors_exit_one_and_name_the_flag() {
    let cases: [(&[&str], &str); 6] = [
        (&["--optimizer", "newton"], "--optimizer"),
        (&["--d", "2", "--n", "5", "--runs", "0"], "--runs"),
        (&["--d", "0", "--n", "5"], "--d"),
        (&["--d", "3"], "--n"),
        (&["--problem", "poisson"], "--problem"),
        (&["--format", "json"], "--format"),
    ];
    for (args, flag) in cases {
        let out = bench(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
        assert!(stderr(&out).contains(flag), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn bad_dataset_exits_two() {
    let mut file = NamedTempFile::new().unwrap();
    write!(file, "1,2,3\n4,five,6\n").unwrap();
    let out = bench(&["--dataset", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--dataset"), "{}", stderr(&out));

    let out = bench(&["--dataset", "/nonexistent/data.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    let out = bench(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("--max-iterations"));
}
