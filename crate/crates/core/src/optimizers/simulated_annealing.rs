//! Simulated annealing with Metropolis acceptance and geometric cooling.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{prepare, Optimizer};
use crate::callbacks::Callback;
use crate::capabilities::ObjectiveCapabilities;
use crate::element::Element;
use crate::objective::Function;
use crate::result::{OptimError, OptimizationResult, TerminationReason};
use crate::session::{setup_stop, Session, Stop};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaConfig {
    /// `None` selects `100 |f(x0)| + 1`.
    pub initial_temperature: Option<f64>,
    /// Geometric schedule `T <- cooling_factor * T`, in `(0, 1)`.
    pub cooling_factor: f64,
    /// Proposals per temperature level; `None` selects `20 * dim`.
    pub moves_per_temperature: Option<usize>,
    /// Proposal half-width relative to `1 + |x_j|`.
    pub move_scale: f64,
    /// The temperature never drops below this.
    pub min_temperature: f64,
    /// Proposals (one objective evaluation each); must be at least 1.
    pub max_iterations: usize,
    pub rng_seed: u64,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self {
            initial_temperature: None,
            cooling_factor: 0.93,
            moves_per_temperature: None,
            move_scale: 0.02,
            min_temperature: 1e-10,
            max_iterations: 100_000,
            rng_seed: 0,
        }
    }
}

/// Gradient-free simulated annealing.
///
/// Each iteration perturbs one uniformly chosen coordinate `j` by
/// `U(-s (1 + |x_j|), s (1 + |x_j|))` with `s = move_scale`. A proposal that
/// does not increase the objective is always accepted; an increase `df` is
/// accepted with probability `exp(-df / T)`; a NaN proposal is rejected.
/// The best point ever visited is returned in `x`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SimulatedAnnealing {
    pub config: SaConfig,
}

impl SimulatedAnnealing {
    pub const NAME: &'static str = "simulated annealing";

    pub fn new(config: SaConfig) -> Self {
        Self { config }
    }

    fn validate(&self) -> Result<(), OptimError> {
        let c = &self.config;
        let invalid = |field, reason| OptimError::InvalidConfig {
            optimizer: Self::NAME,
            field,
            reason,
        };
        if !(c.cooling_factor > 0.0 && c.cooling_factor < 1.0) {
            return Err(invalid("cooling_factor", "must lie in (0, 1)"));
        }
        if matches!(c.initial_temperature, Some(t) if !(t > 0.0)) {
            return Err(invalid("initial_temperature", "must be positive"));
        }
        if c.moves_per_temperature == Some(0) {
            return Err(invalid("moves_per_temperature", "must be at least 1"));
        }
        if !(c.move_scale > 0.0) {
            return Err(invalid("move_scale", "must be positive"));
        }
        if !(c.min_temperature >= 0.0) {
            return Err(invalid("min_temperature", "must be non-negative"));
        }
        if c.max_iterations == 0 {
            return Err(invalid("max_iterations", "must be at least 1"));
        }
        Ok(())
    }

    pub fn optimize<T, F>(
        &self,
        f: &F,
        x: &mut Array2<T>,
        callbacks: &mut [&mut dyn Callback<T>],
    ) -> Result<OptimizationResult<T>, OptimError>
    where
        T: Element,
        F: Function<T> + ?Sized,
    {
        self.validate()?;
        prepare(
            Self::NAME,
            &ObjectiveCapabilities::EVALUATE,
            f.capabilities(),
            f.check_point(x),
            x,
        )?;
        let cfg = &self.config;
        let mut session = Session::new(callbacks);
        let f0 = match session.begin().and_then(|_| session.evaluate(f, x)) {
            Ok(v) => v,
            Err(stop) => return setup_stop(session, stop),
        };
        if !f0.is_finite() {
            return Err(OptimError::NonFiniteObjective);
        }

        let dim = x.len();
        let moves_per_temperature = cfg.moves_per_temperature.unwrap_or(20 * dim);
        let mut temperature = cfg
            .initial_temperature
            .unwrap_or(100.0 * f0.as_f64().abs() + 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);

        let mut current = x.clone();
        let mut f_current = f0;
        let mut f_best = f0;
        let mut iterations = 0;

        let termination = loop {
            if iterations >= cfg.max_iterations {
                break TerminationReason::MaxIterations;
            }
            let j = rng.random_range(0..dim);
            let xj = *current.iter().nth(j).expect("coordinate in range");
            let half_width = cfg.move_scale * (1.0 + xj.as_f64().abs());
            let delta = rng.random_range(-half_width..=half_width);
            let mut proposal = current.clone();
            let slot = proposal.iter_mut().nth(j).expect("coordinate in range");
            *slot += T::of(delta);

            let f_proposal = match session.evaluate(f, &proposal) {
                Ok(v) => v,
                Err(Stop::Halt) => break TerminationReason::CallbackRequested,
                Err(Stop::Contract(d)) => return Err(d.into()),
            };
            // the uniform draw is made for every proposal so the random
            // stream does not depend on the objective
            let u: f64 = rng.random();
            if metropolis_accepts(f_current.as_f64(), f_proposal.as_f64(), temperature, u) {
                current = proposal;
                f_current = f_proposal;
                if f_current < f_best {
                    f_best = f_current;
                    x.assign(&current);
                }
            }
            iterations += 1;
            if iterations % moves_per_temperature == 0 {
                temperature = (temperature * cfg.cooling_factor).max(cfg.min_temperature);
            }
            if session.step(iterations, f_current, None, &current).is_err() {
                break TerminationReason::CallbackRequested;
            }
        };
        Ok(session.finish(f_best, iterations, termination))
    }
}

/// Metropolis rule with a pre-drawn `u ~ U[0, 1)`.
pub fn metropolis_accepts(f_current: f64, f_proposal: f64, temperature: f64, u: f64) -> bool {
    if f_proposal.is_nan() {
        return false;
    }
    let delta = f_proposal - f_current;
    if delta <= 0.0 {
        return true;
    }
    if temperature <= 0.0 {
        return false;
    }
    u < (-delta / temperature).exp()
}

impl<T: Element, F: Function<T> + ?Sized> Optimizer<T, F> for SimulatedAnnealing {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn requirements(&self) -> ObjectiveCapabilities {
        ObjectiveCapabilities::EVALUATE
    }

    fn optimize(
        &self,
        f: &F,
        x: &mut Array2<T>,
        callbacks: &mut [&mut dyn Callback<T>],
    ) -> Result<OptimizationResult<T>, OptimError> {
        SimulatedAnnealing::optimize(self, f, x, callbacks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_increasing_moves_always_accepted() {
        assert!(metropolis_accepts(1.0, 1.0, 1e-300, 0.999_999));
        assert!(metropolis_accepts(1.0, 0.5, 0.0, 0.999_999));
    }

    #[test]
    fn worsening_moves_rejected_at_floor_temperature() {
        assert!(!metropolis_accepts(1.0, 1.0 + 1e-6, 1e-10, 0.0));
        assert!(!metropolis_accepts(1.0, 2.0, 0.0, 0.0));
    }

    #[test]
    fn acceptance_probability_is_boltzmann() {
        // exp(-1) ~= 0.3679
        assert!(metropolis_accepts(0.0, 1.0, 1.0, 0.36));
        assert!(!metropolis_accepts(0.0, 1.0, 1.0, 0.37));
    }

    #[test]
    fn nan_rejected() {
        assert!(!metropolis_accepts(1.0, f64::NAN, 1e6, 0.0));
    }
}
