//! Mini-batch stochastic gradient descent with pluggable update policies.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::update::{UpdatePolicy, UpdatePolicyKind};
use super::{prepare, Optimizer};
use crate::callbacks::Callback;
use crate::capabilities::ObjectiveCapabilities;
use crate::element::{average_in_place, inf_norm, Element};
use crate::objective::SeparableDifferentiable;
use crate::result::{OptimError, OptimizationResult, TerminationReason};
use crate::session::{setup_stop, Session, Stop};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdConfig {
    pub step_size: f64,
    pub batch_size: usize,
    /// Single-batch steps; 0 means unlimited.
    pub max_iterations: usize,
    /// Stop when the epoch-mean objective changes by less than this.
    pub tolerance: f64,
    pub shuffle: bool,
    pub rng_seed: u64,
    pub update_policy: UpdatePolicyKind,
}

impl Default for SgdConfig {
    fn default() -> Self {
        Self {
            step_size: 0.01,
            batch_size: 32,
            max_iterations: 100_000,
            tolerance: 1e-5,
            shuffle: true,
            rng_seed: 0,
            update_policy: UpdatePolicyKind::Vanilla,
        }
    }
}

/// Stochastic gradient descent over the parts of a separable objective.
///
/// Each epoch visits every part once. With `shuffle` on, the part indices are
/// permuted (Fisher-Yates, seeded from `rng_seed`) at the start of every
/// epoch and consecutive chunks of `batch_size` indices form the batches;
/// the final chunk may be short. A batch gradient is the mean of its member
/// gradients, and the policy turns it into a step.
///
/// `iterations` counts batch steps. Call counters count parts, so one batch
/// of `b` members adds `b` to both counters.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Sgd {
    pub config: SgdConfig,
}

impl Sgd {
    pub const NAME: &'static str = "SGD";

    pub fn new(config: SgdConfig) -> Self {
        Self { config }
    }

    fn validate(&self) -> Result<(), OptimError> {
        let invalid = |field, reason| OptimError::InvalidConfig {
            optimizer: Self::NAME,
            field,
            reason,
        };
        if !(self.config.step_size > 0.0) {
            return Err(invalid("step_size", "must be positive"));
        }
        if self.config.batch_size == 0 {
            return Err(invalid("batch_size", "must be at least 1"));
        }
        if !(self.config.tolerance >= 0.0) {
            return Err(invalid("tolerance", "must be non-negative"));
        }
        self.config
            .update_policy
            .validate()
            .map_err(|(field, reason)| invalid(field, reason))
    }

    /// Runs with the policy named in the configuration.
    pub fn optimize<T, F>(
        &self,
        f: &F,
        x: &mut Array2<T>,
        callbacks: &mut [&mut dyn Callback<T>],
    ) -> Result<OptimizationResult<T>, OptimError>
    where
        T: Element,
        F: SeparableDifferentiable<T> + ?Sized,
    {
        self.validate()?;
        let mut policy = self.config.update_policy.build::<T>();
        self.optimize_with_policy(f, x, policy.as_mut(), callbacks)
    }

    /// Runs with a caller-supplied policy; `config.update_policy` is ignored.
    ///
    /// On return `x` holds the last iterate and `final_objective` is the full
    /// objective `sum_i f_i(x)` there. If a callback ended the run, no further
    /// evaluation is made and `final_objective` is the latest batch mean
    /// scaled to the full sum (NaN if no batch completed).
    pub fn optimize_with_policy<T, F, P>(
        &self,
        f: &F,
        x: &mut Array2<T>,
        policy: &mut P,
        callbacks: &mut [&mut dyn Callback<T>],
    ) -> Result<OptimizationResult<T>, OptimError>
    where
        T: Element,
        F: SeparableDifferentiable<T> + ?Sized,
        P: UpdatePolicy<T> + ?Sized,
    {
        self.validate()?;
        prepare(
            Self::NAME,
            &ObjectiveCapabilities::SEPARABLE_DIFFERENTIABLE,
            f.capabilities(),
            f.check_point(x),
            x,
        )?;
        let cfg = &self.config;
        let n = f.num_functions();
        if n == 0 {
            return Err(crate::capabilities::Diagnostic::new(
                "evaluate_batch objective reports num_functions = 0",
                vec![crate::capabilities::Method::SeparableEvaluate],
            )
            .into());
        }
        let mut session = Session::new(callbacks);
        if let Err(stop) = session.begin() {
            return setup_stop(session, stop);
        }

        let step_size = T::of(cfg.step_size);
        let tolerance = T::of(cfg.tolerance);
        let total = T::of(n as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        let mut order: Vec<usize> = (0..n).collect();
        let mut runs = Vec::new();
        let mut iterations = 0;
        let mut epoch = 0;
        let mut previous_mean: Option<T> = None;
        let mut last_estimate = T::nan();

        let termination = 'epochs: loop {
            epoch += 1;
            if session.begin_epoch(epoch).is_err() {
                break TerminationReason::CallbackRequested;
            }
            if cfg.shuffle {
                order.shuffle(&mut rng);
            }
            let mut epoch_sum = T::zero();
            for batch in order.chunks(cfg.batch_size) {
                if cfg.max_iterations != 0 && iterations >= cfg.max_iterations {
                    break 'epochs TerminationReason::MaxIterations;
                }
                contiguous_runs(batch, &mut runs);
                let (value, mut gradient) =
                    match batch_value_and_gradient(&mut session, f, x, &runs) {
                        Ok(v) => v,
                        Err(Stop::Halt) => break 'epochs TerminationReason::CallbackRequested,
                        Err(Stop::Contract(d)) => return Err(d.into()),
                    };
                average_in_place(&mut gradient, batch.len());
                let step = policy.step(&gradient, step_size);
                *x += &step;
                iterations += 1;
                epoch_sum += value;
                let batch_mean = value / T::of(batch.len() as f64);
                last_estimate = batch_mean * total;
                if session
                    .step(iterations, batch_mean, Some(inf_norm(&gradient)), x)
                    .is_err()
                {
                    break 'epochs TerminationReason::CallbackRequested;
                }
            }
            let mean = epoch_sum / total;
            last_estimate = epoch_sum;
            if session.end_epoch(epoch, mean).is_err() {
                break TerminationReason::CallbackRequested;
            }
            if let Some(prev) = previous_mean {
                if (prev - mean).abs() < tolerance {
                    break TerminationReason::ObjectiveImprovementTolerance;
                }
            }
            previous_mean = Some(mean);
        };

        let final_objective = if termination == TerminationReason::CallbackRequested {
            last_estimate
        } else {
            match session.evaluate_batch(f, x, 0, n) {
                Ok(v) => v,
                Err(Stop::Halt) => last_estimate,
                Err(Stop::Contract(d)) => return Err(d.into()),
            }
        };
        Ok(session.finish(final_objective, iterations, termination))
    }
}

/// Splits a batch of part indices into maximal ascending contiguous windows
/// `(begin, size)`.
fn contiguous_runs(batch: &[usize], runs: &mut Vec<(usize, usize)>) {
    let mut sorted = batch.to_vec();
    sorted.sort_unstable();
    runs.clear();
    for i in sorted {
        match runs.last_mut() {
            Some((begin, size)) if *begin + *size == i => *size += 1,
            _ => runs.push((i, 1)),
        }
    }
}

fn batch_value_and_gradient<T, F>(
    session: &mut Session<'_, '_, T>,
    f: &F,
    x: &Array2<T>,
    runs: &[(usize, usize)],
) -> Result<(T, Array2<T>), Stop>
where
    T: Element,
    F: SeparableDifferentiable<T> + ?Sized,
{
    let mut total: Option<(T, Array2<T>)> = None;
    for &(begin, size) in runs {
        let (value, gradient) = session.evaluate_with_gradient_batch(f, x, begin, size)?;
        total = Some(match total {
            None => (value, gradient),
            Some((acc, mut acc_gradient)) => {
                acc_gradient += &gradient;
                (acc + value, acc_gradient)
            }
        });
    }
    Ok(total.expect("batch has at least one member"))
}

impl<T: Element, F: SeparableDifferentiable<T> + ?Sized> Optimizer<T, F> for Sgd {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn requirements(&self) -> ObjectiveCapabilities {
        ObjectiveCapabilities::SEPARABLE_DIFFERENTIABLE
    }

    fn optimize(
        &self,
        f: &F,
        x: &mut Array2<T>,
        callbacks: &mut [&mut dyn Callback<T>],
    ) -> Result<OptimizationResult<T>, OptimError> {
        Sgd::optimize(self, f, x, callbacks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_coalesce_after_sorting() {
        let mut runs = Vec::new();
        contiguous_runs(&[5, 1, 2, 9, 0, 6], &mut runs);
        assert_eq!(runs, vec![(0, 3), (5, 2), (9, 1)]);
        contiguous_runs(&[3, 2, 1, 0], &mut runs);
        assert_eq!(runs, vec![(0, 4)]);
    }
}
