use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::capabilities::Diagnostic;
use crate::element::Element;

/// Why an optimization run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TerminationReason {
    GradientNormTolerance,
    ObjectiveImprovementTolerance,
    MaxIterations,
    CallbackRequested,
    LineSearchFailure,
    StepSizeUnderflow,
}

impl TerminationReason {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::GradientNormTolerance => "gradient_norm_tolerance",
            Self::ObjectiveImprovementTolerance => "objective_improvement_tolerance",
            Self::MaxIterations => "max_iterations",
            Self::CallbackRequested => "callback_requested",
            Self::LineSearchFailure => "line_search_failure",
            Self::StepSizeUnderflow => "step_size_underflow",
        }
    }
}

impl fmt::Display for TerminationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TerminationReason {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Self::GradientNormTolerance,
            Self::ObjectiveImprovementTolerance,
            Self::MaxIterations,
            Self::CallbackRequested,
            Self::LineSearchFailure,
            Self::StepSizeUnderflow,
        ]
        .into_iter()
        .find(|r| r.as_str() == s)
        .ok_or_else(|| format!("unknown termination reason `{s}`"))
    }
}

/// Summary of one optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult<T: Element> {
    /// Objective at the returned point. NaN only if a callback terminated the
    /// run before the first evaluation.
    pub final_objective: T,
    pub iterations: usize,
    pub termination: TerminationReason,
    pub elapsed_seconds: f64,
    /// User-level evaluate calls, including those triggered by inference adapters.
    pub evaluate_calls: usize,
    pub gradient_calls: usize,
}

/// Errors that prevent an optimizer from running.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimError {
    #[error(transparent)]
    Diagnostic(#[from] Diagnostic),
    #[error("starting point contains NaN or infinite elements")]
    NonFiniteStart,
    #[error("objective is not finite at the starting point")]
    NonFiniteObjective,
    #[error("invalid {optimizer} configuration: {field} {reason}")]
    InvalidConfig {
        optimizer: &'static str,
        field: &'static str,
        reason: &'static str,
    },
}
