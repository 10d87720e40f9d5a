//! Benchmark harness for the optkit optimizers.
//!
//! Each [`BenchSpec`] names a problem shape and an optimizer; [`run_bench`]
//! builds the data for every run, times only the optimize call, and returns
//! per-run timings and objectives. [`emit_report`] renders records as CSV or
//! as a markdown table with one column per dataset size.

mod report;
mod run;
mod spec;

pub use report::{emit_report, CSV_HEADER};
pub use run::{
    run_bench, run_bench_with, BenchError, BenchRecord, Clock, MonotonicClock, RunOutcome,
};
pub use spec::{
    parse_optimizer_list, BenchSpec, OptimizerKind, OutputFormat, Overrides, Problem, SpecError,
};

/// Dataset sizes `(d, n)` run when none are given.
pub const DEFAULT_GRID: [(usize, usize); 4] = [(10, 100), (10, 1_000), (10, 10_000), (100, 10_000)];
