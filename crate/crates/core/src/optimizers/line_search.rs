//! Armijo backtracking along a descent direction.

use ndarray::Array2;
use thiserror::Error;

use crate::element::{dot, Element};
use crate::objective::Function;

/// Trial steps below this are treated as underflow.
pub const MIN_STEP: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmijoBacktracking {
    /// Sufficient-decrease constant `c1` in `(0, 1)`.
    pub armijo_constant: f64,
    /// Step shrink factor in `(0, 1)`.
    pub backtrack_factor: f64,
    pub max_trials: usize,
}

impl Default for ArmijoBacktracking {
    fn default() -> Self {
        Self {
            armijo_constant: 1e-4,
            backtrack_factor: 0.5,
            max_trials: 50,
        }
    }
}

/// An accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchStep<T: Element> {
    pub step: T,
    pub point: Array2<T>,
    pub value: T,
    /// Objective evaluations spent, including the accepted one.
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LineSearchError {
    #[error("no step satisfied the Armijo condition within {0} trials")]
    NoSufficientDecrease(usize),
    #[error("trial step fell below {MIN_STEP:e}")]
    StepSizeUnderflow,
}

impl ArmijoBacktracking {
    /// Largest step in `{1, b, b^2, ...}` with
    /// `f(x + a d) <= f(x) + c1 a g'd`.
    ///
    /// A NaN trial value never satisfies the condition, so it is rejected and
    /// backtracking continues.
    pub fn search<T: Element, F: Function<T> + ?Sized>(
        &self,
        f: &F,
        x: &Array2<T>,
        fx: T,
        gradient: &Array2<T>,
        direction: &Array2<T>,
    ) -> Result<LineSearchStep<T>, LineSearchError> {
        let slope = dot(gradient, direction);
        match self.search_with(
            |p| Ok::<T, ()>(f.evaluate(p)),
            x,
            fx,
            slope,
            direction,
            T::one(),
        ) {
            Ok(outcome) => outcome,
            Err(()) => unreachable!(),
        }
    }

    /// Backtracking from `initial_step` with a fallible evaluator; the outer
    /// error aborts the search immediately without further evaluations.
    pub(crate) fn search_with<T: Element, E>(
        &self,
        mut evaluate: impl FnMut(&Array2<T>) -> Result<T, E>,
        x: &Array2<T>,
        fx: T,
        slope: T,
        direction: &Array2<T>,
        initial_step: T,
    ) -> Result<Result<LineSearchStep<T>, LineSearchError>, E> {
        let c1 = T::of(self.armijo_constant);
        let beta = T::of(self.backtrack_factor);
        let min_step = T::of(MIN_STEP);
        let mut step = initial_step;
        for trial in 1..=self.max_trials {
            if step < min_step {
                return Ok(Err(LineSearchError::StepSizeUnderflow));
            }
            let point = x + &(direction * step);
            let value = evaluate(&point)?;
            if value <= fx + c1 * step * slope {
                return Ok(Ok(LineSearchStep {
                    step,
                    point,
                    value,
                    trials: trial,
                }));
            }
            step *= beta;
        }
        Ok(Err(LineSearchError::NoSufficientDecrease(self.max_trials)))
    }
}
