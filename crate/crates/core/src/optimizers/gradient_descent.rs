use ndarray::Array2;

use super::{prepare, Optimizer};
use crate::callbacks::Callback;
use crate::capabilities::ObjectiveCapabilities;
use crate::element::{inf_norm, relative_change, Element};
use crate::objective::Differentiable;
use crate::result::{OptimError, OptimizationResult, TerminationReason};
use crate::session::{setup_stop, Session, Stop};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdConfig {
    pub step_size: f64,
    /// 0 means unlimited.
    pub max_iterations: usize,
    pub min_gradient_norm: f64,
    pub min_objective_improvement: f64,
}

impl Default for GdConfig {
    fn default() -> Self {
        Self {
            step_size: 0.01,
            max_iterations: 100_000,
            min_gradient_norm: 1e-6,
            min_objective_improvement: 1e-10,
        }
    }
}

/// Fixed-step gradient descent, `x <- x - step_size * g`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GradientDescent {
    pub config: GdConfig,
}

impl GradientDescent {
    pub const NAME: &'static str = "gradient descent";

    pub fn new(config: GdConfig) -> Self {
        Self { config }
    }

    /// Minimizes `f` from `x`, leaving the last iterate in `x`.
    ///
    /// No step is ever rejected, so a step size above `1/L` can diverge; the
    /// run then ends on `max_iterations` with whatever objective it reached.
    pub fn optimize<T, F>(
        &self,
        f: &F,
        x: &mut Array2<T>,
        callbacks: &mut [&mut dyn Callback<T>],
    ) -> Result<OptimizationResult<T>, OptimError>
    where
        T: Element,
        F: Differentiable<T> + ?Sized,
    {
        let cfg = &self.config;
        if !(cfg.step_size > 0.0) {
            return Err(OptimError::InvalidConfig {
                optimizer: Self::NAME,
                field: "step_size",
                reason: "must be positive",
            });
        }
        prepare(
            Self::NAME,
            &ObjectiveCapabilities::DIFFERENTIABLE,
            f.capabilities(),
            f.check_point(x),
            x,
        )?;
        let mut session = Session::new(callbacks);
        let (mut fx, mut g) = match session
            .begin()
            .and_then(|_| session.evaluate_with_gradient(f, x))
        {
            Ok(v) => v,
            Err(stop) => return setup_stop(session, stop),
        };

        let step_size = T::of(cfg.step_size);
        let min_gradient_norm = T::of(cfg.min_gradient_norm);
        let min_improvement = T::of(cfg.min_objective_improvement);
        let mut iterations = 0;

        let termination = loop {
            if inf_norm(&g) <= min_gradient_norm {
                break TerminationReason::GradientNormTolerance;
            }
            if cfg.max_iterations != 0 && iterations >= cfg.max_iterations {
                break TerminationReason::MaxIterations;
            }
            let next = apply_step(x, &g, step_size);
            let (f_next, g_next) = match session.evaluate_with_gradient(f, &next) {
                Ok(v) => v,
                Err(Stop::Halt) => break TerminationReason::CallbackRequested,
                Err(Stop::Contract(d)) => return Err(d.into()),
            };
            let change = relative_change(fx, f_next);
            *x = next;
            fx = f_next;
            g = g_next;
            iterations += 1;
            if session.step(iterations, fx, Some(inf_norm(&g)), x).is_err() {
                break TerminationReason::CallbackRequested;
            }
            if change <= min_improvement {
                break TerminationReason::ObjectiveImprovementTolerance;
            }
        };
        Ok(session.finish(fx, iterations, termination))
    }
}

/// `x - step_size * g`, computed as the vanilla SGD update does.
pub(crate) fn apply_step<T: Element>(x: &Array2<T>, g: &Array2<T>, step_size: T) -> Array2<T> {
    let mut next = x.clone();
    next.scaled_add(-step_size, g);
    next
}

impl<T: Element, F: Differentiable<T> + ?Sized> Optimizer<T, F> for GradientDescent {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn requirements(&self) -> ObjectiveCapabilities {
        ObjectiveCapabilities::DIFFERENTIABLE
    }

    fn optimize(
        &self,
        f: &F,
        x: &mut Array2<T>,
        callbacks: &mut [&mut dyn Callback<T>],
    ) -> Result<OptimizationResult<T>, OptimError> {
        GradientDescent::optimize(self, f, x, callbacks)
    }
}
