use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    Linear,
    Logistic,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Linear => "linear",
            Problem::Logistic => "logistic",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Problem::Linear),
            "logistic" => Ok(Problem::Logistic),
            _ => Err(SpecError::UnknownValue {
                flag: "--problem",
                value: s.to_string(),
                expected: "linear, logistic",
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptimizerKind {
    Lbfgs,
    Gd,
    Sgd,
    SgdMomentum,
    Adam,
    Sa,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 6] = [
        OptimizerKind::Lbfgs,
        OptimizerKind::Gd,
        OptimizerKind::Sgd,
        OptimizerKind::SgdMomentum,
        OptimizerKind::Adam,
        OptimizerKind::Sa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Lbfgs => "lbfgs",
            OptimizerKind::Gd => "gd",
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::SgdMomentum => "sgd-momentum",
            OptimizerKind::Adam => "adam",
            OptimizerKind::Sa => "sa",
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SpecError::UnknownValue {
                flag: "--optimizer",
                value: s.to_string(),
                expected: "lbfgs, gd, sgd, sgd-momentum, adam, sa",
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "markdown" => Ok(OutputFormat::Markdown),
            _ => Err(SpecError::UnknownValue {
                flag: "--format",
                value: s.to_string(),
                expected: "csv, markdown",
            }),
        }
    }
}

/// Optimizer settings that override the harness defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    /// Step size for gd and the SGD family.
    pub step_size: Option<f64>,
    /// Mini-batch size for the SGD family.
    pub batch_size: Option<usize>,
}

/// One benchmark configuration: a problem shape, an optimizer and a number
/// of timed runs.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub problem: Problem,
    pub d: usize,
    pub n: usize,
    /// Load this CSV once instead of generating data; `d` and `n` are then
    /// taken from the file.
    pub dataset: Option<PathBuf>,
    pub optimizer: OptimizerKind,
    pub overrides: Overrides,
    pub runs: usize,
    pub max_iterations: usize,
    pub seed: u64,
    pub noise_scale: f64,
}

impl Default for BenchSpec {
    fn default() -> Self {
        Self {
            problem: Problem::Linear,
            d: 10,
            n: 100,
            dataset: None,
            optimizer: OptimizerKind::Lbfgs,
            overrides: Overrides::default(),
            runs: 5,
            max_iterations: 10,
            seed: 0,
            noise_scale: 10.0,
        }
    }
}

impl BenchSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        let invalid = |flag, reason| Err(SpecError::Invalid { flag, reason });
        if self.runs == 0 {
            return invalid("--runs", "must be at least 1");
        }
        if self.dataset.is_none() && self.d == 0 {
            return invalid("--d", "must be at least 1");
        }
        if self.dataset.is_none() && self.n == 0 {
            return invalid("--n", "must be at least 1");
        }
        if self.max_iterations == 0 {
            return invalid("--max-iterations", "must be at least 1");
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return invalid("--noise", "must be a finite non-negative number");
        }
        if matches!(self.overrides.step_size, Some(s) if !(s > 0.0 && s.is_finite())) {
            return invalid("--step-size", "must be a finite positive number");
        }
        if self.overrides.batch_size == Some(0) {
            return invalid("--batch-size", "must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("{flag}: unknown value `{value}` (expected one of: {expected})")]
    UnknownValue {
        flag: &'static str,
        value: String,
        expected: &'static str,
    },
    #[error("{flag} {reason}")]
    Invalid {
        flag: &'static str,
        reason: &'static str,
    },
}

/// Parses a comma-separated optimizer list such as `lbfgs,adam`.
pub fn parse_optimizer_list(s: &str) -> Result<Vec<OptimizerKind>, SpecError> {
    s.split(',').map(|part| part.trim().parse()).collect()
}
