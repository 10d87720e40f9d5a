//! Limited-memory BFGS with Armijo backtracking.
//!
//! The search direction comes from the two-loop recursion over the most
//! recent `memory_size` curvature pairs, with the initial inverse Hessian
//! scaled by `s'y / y'y` of the newest pair. Pairs failing
//! `y's > 1e-14 |s| |y|` are never stored, which keeps the implied inverse
//! Hessian positive definite.

use std::collections::VecDeque;

use ndarray::{Array2, Zip};

use super::line_search::{ArmijoBacktracking, LineSearchError};
use super::{prepare, Optimizer};
use crate::callbacks::Callback;
use crate::capabilities::ObjectiveCapabilities;
use crate::element::{dot, inf_norm, l2_norm, relative_change, Element};
use crate::objective::Differentiable;
use crate::result::{OptimError, OptimizationResult, TerminationReason};
use crate::session::{setup_stop, Session, Stop};

const CURVATURE_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsConfig {
    pub memory_size: usize,
    /// Outer iterations; 0 means unlimited.
    pub max_iterations: usize,
    /// Stop when the infinity norm of the gradient is at most this.
    pub min_gradient_norm: f64,
    /// Stop when the relative objective change of a step is at most this.
    pub min_objective_improvement: f64,
    pub armijo_constant: f64,
    pub backtrack_factor: f64,
    pub max_line_search_trials: usize,
}

impl Default for LbfgsConfig {
    fn default() -> Self {
        Self {
            memory_size: 10,
            max_iterations: 10_000,
            min_gradient_norm: 1e-6,
            min_objective_improvement: 1e-10,
            armijo_constant: 1e-4,
            backtrack_factor: 0.5,
            max_line_search_trials: 50,
        }
    }
}

/// Ring buffer of `(s, y, rho)` curvature pairs, newest last.
#[derive(Debug, Clone)]
pub struct LbfgsMemory<T: Element> {
    capacity: usize,
    pairs: VecDeque<(Array2<T>, Array2<T>, T)>,
}

impl<T: Element> LbfgsMemory<T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "memory size must be at least 1");
        Self {
            capacity,
            pairs: VecDeque::with_capacity(capacity),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn clear(&mut self) {
        self.pairs.clear();
    }

    /// Stores `s = x_{k+1} - x_k`, `y = g_{k+1} - g_k` unless the pair fails
    /// the curvature safeguard. Returns whether it was stored.
    pub fn push(&mut self, s: Array2<T>, y: Array2<T>) -> bool {
        let sy = dot(&s, &y);
        let threshold = T::of(CURVATURE_EPS) * l2_norm(&s) * l2_norm(&y);
        if !(sy > threshold) {
            return false;
        }
        if self.pairs.len() == self.capacity {
            self.pairs.pop_front();
        }
        let rho = T::one() / sy;
        self.pairs.push_back((s, y, rho));
        true
    }

    /// Two-loop recursion: returns `-H g`.
    ///
    /// With an empty memory this is exactly `-g`.
    pub fn direction(&self, g: &Array2<T>) -> Array2<T> {
        let Some((s_new, y_new, _)) = self.pairs.back() else {
            return g.mapv(|v| -v);
        };
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(self.pairs.len());
        for (s, y, rho) in self.pairs.iter().rev() {
            let alpha = *rho * dot(s, &q);
            q.scaled_add(-alpha, y);
            alphas.push(alpha);
        }
        let gamma = dot(s_new, y_new) / dot(y_new, y_new);
        q.mapv_inplace(|v| v * gamma);
        for ((s, y, rho), alpha) in self.pairs.iter().zip(alphas.into_iter().rev()) {
            let beta = *rho * dot(y, &q);
            q.scaled_add(alpha - beta, s);
        }
        q.mapv_inplace(|v| -v);
        q
    }
}

/// L-BFGS optimizer.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Lbfgs {
    pub config: LbfgsConfig,
}

impl Lbfgs {
    pub const NAME: &'static str = "L-BFGS";

    pub fn new(config: LbfgsConfig) -> Self {
        Self { config }
    }

    fn validate(&self) -> Result<(), OptimError> {
        let c = &self.config;
        let invalid = |field, reason| OptimError::InvalidConfig {
            optimizer: Self::NAME,
            field,
            reason,
        };
        if c.memory_size == 0 {
            return Err(invalid("memory_size", "must be at least 1"));
        }
        if !(c.min_gradient_norm >= 0.0) {
            return Err(invalid("min_gradient_norm", "must be non-negative"));
        }
        if !(c.min_objective_improvement >= 0.0) {
            return Err(invalid("min_objective_improvement", "must be non-negative"));
        }
        if !(c.armijo_constant > 0.0 && c.armijo_constant < 1.0) {
            return Err(invalid("armijo_constant", "must lie in (0, 1)"));
        }
        if !(c.backtrack_factor > 0.0 && c.backtrack_factor < 1.0) {
            return Err(invalid("backtrack_factor", "must lie in (0, 1)"));
        }
        if c.max_line_search_trials == 0 {
            return Err(invalid("max_line_search_trials", "must be at least 1"));
        }
        Ok(())
    }

    fn line_search(&self) -> ArmijoBacktracking {
        ArmijoBacktracking {
            armijo_constant: self.config.armijo_constant,
            backtrack_factor: self.config.backtrack_factor,
            max_trials: self.config.max_line_search_trials,
        }
    }

    /// Minimizes `f` starting from `x`, which holds the best accepted iterate
    /// on return.
    ///
    /// `iterations` counts accepted steps. The gradient is computed once at
    /// the start and once per accepted step; every line-search trial counts
    /// as one evaluate call.
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
        self.validate()?;
        prepare(
            Self::NAME,
            &ObjectiveCapabilities::DIFFERENTIABLE,
            f.capabilities(),
            f.check_point(x),
            x,
        )?;
        let cfg = &self.config;
        let mut session = Session::new(callbacks);
        let (mut fx, mut g) = match session
            .begin()
            .and_then(|_| session.evaluate_with_gradient(f, x))
        {
            Ok(v) => v,
            Err(stop) => return setup_stop(session, stop),
        };
        if !fx.is_finite() {
            return Err(OptimError::NonFiniteObjective);
        }

        let min_gradient_norm = T::of(cfg.min_gradient_norm);
        let min_improvement = T::of(cfg.min_objective_improvement);
        let line_search = self.line_search();
        let mut memory = LbfgsMemory::new(cfg.memory_size);
        let mut iterations = 0;

        let termination = loop {
            if inf_norm(&g) <= min_gradient_norm {
                break TerminationReason::GradientNormTolerance;
            }
            if cfg.max_iterations != 0 && iterations >= cfg.max_iterations {
                break TerminationReason::MaxIterations;
            }

            let mut direction = memory.direction(&g);
            let mut slope = dot(&g, &direction);
            if !(slope < T::zero()) {
                memory.clear();
                direction = g.mapv(|v| -v);
                slope = -dot(&g, &g);
            }

            // without curvature pairs the direction is -g, whose length says
            // nothing about a good step; start that search at 1/|d|
            let initial_step = if memory.is_empty() {
                (T::one() / l2_norm(&direction)).min(T::one())
            } else {
                T::one()
            };
            let outcome = line_search.search_with(
                |p| session.evaluate(f, p),
                x,
                fx,
                slope,
                &direction,
                initial_step,
            );
            let accepted = match outcome {
                Ok(Ok(step)) => step,
                Ok(Err(LineSearchError::NoSufficientDecrease(_))) => {
                    break TerminationReason::LineSearchFailure
                }
                Ok(Err(LineSearchError::StepSizeUnderflow)) => {
                    break TerminationReason::StepSizeUnderflow
                }
                Err(Stop::Halt) => break TerminationReason::CallbackRequested,
                Err(Stop::Contract(d)) => return Err(d.into()),
            };
            let g_new = match session.gradient(f, &accepted.point) {
                Ok(g_new) => g_new,
                Err(Stop::Halt) => break TerminationReason::CallbackRequested,
                Err(Stop::Contract(d)) => return Err(d.into()),
            };

            let mut s = accepted.point.clone();
            s -= &*x;
            let mut y = g_new.clone();
            Zip::from(&mut y).and(&g).for_each(|yi, &gi| *yi -= gi);
            memory.push(s, y);

            let change = relative_change(fx, accepted.value);
            *x = accepted.point;
            fx = accepted.value;
            g = g_new;
            iterations += 1;

            if session.step(iterations, fx, Some(inf_norm(&g)), x).is_err() {
                break TerminationReason::CallbackRequested;
            }
            if change <= min_improvement {
                break TerminationReason::ObjectiveImprovementTolerance;
            }
        };
        debug_assert!(termination != TerminationReason::CallbackRequested || session.halted());
        Ok(session.finish(fx, iterations, termination))
    }
}

impl<T: Element, F: Differentiable<T> + ?Sized> Optimizer<T, F> for Lbfgs {
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
        Lbfgs::optimize(self, f, x, callbacks)
    }
}
