use std::path::PathBuf;
use std::time::Instant;

use ndarray::{Array1, Array2};
use optkit::problems::{
    generate_noisy_binary, generate_noisy_linear, load_csv, DatasetError, LinearRegression,
    LogisticRegression,
};
use optkit::{
    Diagnostic, Differentiable, GdConfig, GradientDescent, Lbfgs, LbfgsConfig, OptimError,
    OptimizationResult, SaConfig, SeparableDifferentiable, Sgd, SgdConfig, SimulatedAnnealing,
    TerminationReason, UpdatePolicyKind,
};
use thiserror::Error;

use crate::spec::{BenchSpec, OptimizerKind, Problem, SpecError};

/// Source of timestamps in seconds.
pub trait Clock {
    fn now(&mut self) -> f64;
}

/// Wall-clock monotonic timer.
#[derive(Debug, Clone, Copy)]
pub struct MonotonicClock {
    origin: Instant,
}

impl Default for MonotonicClock {
    fn default() -> Self {
        Self {
            origin: Instant::now(),
        }
    }
}

impl Clock for MonotonicClock {
    fn now(&mut self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }
}

/// Outcome of one timed run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub run: usize,
    pub seconds: f64,
    pub final_objective: f64,
    pub iterations: usize,
    pub termination: TerminationReason,
}

/// Results of every run of one [`BenchSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    /// The [`BenchSpec`] that was run, with `d` and `n` taken from the dataset
    /// when one was loaded.
    pub spec: BenchSpec,
    pub mean_seconds: f64,
    pub run_seconds: Vec<f64>,
    pub final_objectives: Vec<f64>,
    pub terminations: Vec<TerminationReason>,
    pub iterations: Vec<usize>,
}

impl BenchRecord {
    fn from_runs(spec: BenchSpec, runs: Vec<RunOutcome>) -> Self {
        let run_seconds: Vec<f64> = runs.iter().map(|r| r.seconds).collect();
        Self {
            spec,
            mean_seconds: mean(&run_seconds),
            run_seconds,
            final_objectives: runs.iter().map(|r| r.final_objective).collect(),
            terminations: runs.iter().map(|r| r.termination).collect(),
            iterations: runs.iter().map(|r| r.iterations).collect(),
        }
    }

    pub fn final_objective_mean(&self) -> f64 {
        mean(&self.final_objectives)
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("--dataset {}: {source}", path.display())]
    Dataset {
        path: PathBuf,
        #[source]
        source: DatasetError,
    },
    #[error("--problem {problem}: {diagnostic}")]
    Problem {
        problem: Problem,
        diagnostic: Diagnostic,
    },
    #[error("--optimizer {optimizer}: run {run} failed: {source}")]
    Optimizer {
        optimizer: OptimizerKind,
        run: usize,
        #[source]
        source: OptimError,
    },
}

/// Runs `spec` with the monotonic wall clock.
pub fn run_bench(spec: &BenchSpec) -> Result<BenchRecord, BenchError> {
    run_bench_with(spec, &mut MonotonicClock::default(), &mut |_| {})
}

/// Runs `spec`, reading time from `clock` immediately before and after each
/// optimize call and nowhere else. `on_run` sees each outcome after its
/// timing is taken.
pub fn run_bench_with(
    spec: &BenchSpec,
    clock: &mut dyn Clock,
    on_run: &mut dyn FnMut(&RunOutcome),
) -> Result<BenchRecord, BenchError> {
    spec.validate()?;
    let loaded = match &spec.dataset {
        Some(path) => Some(load_csv::<f64>(path).map_err(|source| BenchError::Dataset {
            path: path.clone(),
            source,
        })?),
        None => None,
    };
    let mut echo = spec.clone();
    if let Some(data) = &loaded {
        echo.d = data.predictors.nrows();
        echo.n = data.predictors.ncols();
    }

    let mut outcomes = Vec::with_capacity(spec.runs);
    for run in 0..spec.runs {
        let run_seed = spec.seed.wrapping_add(run as u64);
        let (predictors, responses) = match &loaded {
            Some(data) => (data.predictors.clone(), data.responses.clone()),
            None => generate(spec, run_seed),
        };
        let problem_error = |diagnostic| BenchError::Problem {
            problem: spec.problem,
            diagnostic,
        };
        let result = match spec.problem {
            Problem::Linear => {
                let f = LinearRegression::new(predictors, responses).map_err(problem_error)?;
                run_once(spec, run_seed, &f, &f.separable(), f.dim(), clock)
            }
            Problem::Logistic => {
                let f = LogisticRegression::new(predictors, responses).map_err(problem_error)?;
                run_once(spec, run_seed, &f, &f, f.dim(), clock)
            }
        };
        let (result, seconds) = result.map_err(|source| BenchError::Optimizer {
            optimizer: spec.optimizer,
            run,
            source,
        })?;
        let outcome = RunOutcome {
            run,
            seconds,
            final_objective: result.final_objective,
            iterations: result.iterations,
            termination: result.termination,
        };
        on_run(&outcome);
        outcomes.push(outcome);
    }
    Ok(BenchRecord::from_runs(echo, outcomes))
}

fn generate(spec: &BenchSpec, seed: u64) -> (Array2<f64>, Array1<f64>) {
    let data = match spec.problem {
        Problem::Linear => generate_noisy_linear::<f64>(spec.d, spec.n, spec.noise_scale, seed),
        Problem::Logistic => generate_noisy_binary::<f64>(spec.d, spec.n, spec.noise_scale, seed),
    };
    (data.predictors, data.responses)
}

/// Step size for full-batch gradient descent on a sum of `n` squared
/// residuals with entries in `[-1, 1]`; stays below `2 / L` on generated data.
fn default_gd_step(n: usize) -> f64 {
    0.5 / n as f64
}

fn run_once<F, S>(
    spec: &BenchSpec,
    seed: u64,
    full: &F,
    parts: &S,
    dim: usize,
    clock: &mut dyn Clock,
) -> Result<(OptimizationResult<f64>, f64), OptimError>
where
    F: Differentiable<f64>,
    S: SeparableDifferentiable<f64>,
{
    let mut x = Array2::<f64>::zeros((dim, 1));
    let iterations = spec.max_iterations;
    let sgd = |policy| {
        let defaults = SgdConfig::default();
        Sgd::new(SgdConfig {
            step_size: spec.overrides.step_size.unwrap_or(defaults.step_size),
            batch_size: spec.overrides.batch_size.unwrap_or(defaults.batch_size),
            max_iterations: iterations,
            rng_seed: seed,
            update_policy: policy,
            ..defaults
        })
    };
    // optimizers are built before the clock starts
    match spec.optimizer {
        OptimizerKind::Lbfgs => {
            let opt = Lbfgs::new(LbfgsConfig {
                max_iterations: iterations,
                ..LbfgsConfig::default()
            });
            timed(clock, || opt.optimize(full, &mut x, &mut []))
        }
        OptimizerKind::Gd => {
            let opt = GradientDescent::new(GdConfig {
                step_size: spec
                    .overrides
                    .step_size
                    .unwrap_or_else(|| default_gd_step(parts.num_functions())),
                max_iterations: iterations,
                ..GdConfig::default()
            });
            timed(clock, || opt.optimize(full, &mut x, &mut []))
        }
        OptimizerKind::Sgd => {
            let opt = sgd(UpdatePolicyKind::Vanilla);
            timed(clock, || opt.optimize(parts, &mut x, &mut []))
        }
        OptimizerKind::SgdMomentum => {
            let opt = sgd(UpdatePolicyKind::MOMENTUM);
            timed(clock, || opt.optimize(parts, &mut x, &mut []))
        }
        OptimizerKind::Adam => {
            let opt = sgd(UpdatePolicyKind::ADAM);
            timed(clock, || opt.optimize(parts, &mut x, &mut []))
        }
        OptimizerKind::Sa => {
            let opt = SimulatedAnnealing::new(SaConfig {
                max_iterations: iterations,
                rng_seed: seed,
                ..SaConfig::default()
            });
            timed(clock, || opt.optimize(full, &mut x, &mut []))
        }
    }
}

fn timed<R, E>(clock: &mut dyn Clock, run: impl FnOnce() -> Result<R, E>) -> Result<(R, f64), E> {
    let start = clock.now();
    let out = run();
    let end = clock.now();
    out.map(|r| (r, end - start))
}
