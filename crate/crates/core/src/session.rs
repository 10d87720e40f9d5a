//! Per-run bookkeeping shared by the optimizers: call counters, callback
//! dispatch, and the guarantee that nothing touches the objective after a
//! callback has asked to stop.

use std::time::Instant;

use ndarray::Array2;

use crate::callbacks::{dispatch, Callback, Decision, Event};
use crate::capabilities::Diagnostic;
use crate::element::{inf_norm, Element};
use crate::objective::{Differentiable, Function, SeparableDifferentiable};
use crate::result::{OptimError, OptimizationResult, TerminationReason};

/// Why an objective call did not return a value.
#[derive(Debug)]
pub(crate) enum Stop {
    /// A callback requested termination.
    Halt,
    Contract(Diagnostic),
}

pub(crate) struct Session<'c, 'd, T: Element> {
    callbacks: &'c mut [&'d mut dyn Callback<T>],
    evaluate_calls: usize,
    gradient_calls: usize,
    halted: bool,
    start: Instant,
}

impl<'c, 'd, T: Element> Session<'c, 'd, T> {
    pub(crate) fn new(callbacks: &'c mut [&'d mut dyn Callback<T>]) -> Self {
        Self {
            callbacks,
            evaluate_calls: 0,
            gradient_calls: 0,
            halted: false,
            start: Instant::now(),
        }
    }

    fn notify(&mut self, event: &Event<'_, T>) -> Result<(), Stop> {
        if dispatch(self.callbacks, event) == Decision::Terminate {
            self.halted = true;
        }
        if self.halted {
            Err(Stop::Halt)
        } else {
            Ok(())
        }
    }

    fn guard(&self) -> Result<(), Stop> {
        if self.halted {
            Err(Stop::Halt)
        } else {
            Ok(())
        }
    }

    pub(crate) fn begin(&mut self) -> Result<(), Stop> {
        self.notify(&Event::BeginOptimization)
    }

    pub(crate) fn step(
        &mut self,
        iteration: usize,
        objective: T,
        gradient_norm: Option<T>,
        iterate: &Array2<T>,
    ) -> Result<(), Stop> {
        self.notify(&Event::StepTaken {
            iteration,
            objective,
            gradient_norm,
            iterate,
        })
    }

    pub(crate) fn begin_epoch(&mut self, epoch: usize) -> Result<(), Stop> {
        self.notify(&Event::BeginEpoch { epoch })
    }

    pub(crate) fn end_epoch(&mut self, epoch: usize, mean_objective: T) -> Result<(), Stop> {
        self.notify(&Event::EndEpoch {
            epoch,
            mean_objective,
        })
    }

    fn after_evaluate(&mut self, value: T) -> Result<(), Stop> {
        self.notify(&Event::EvaluateCalled { value })
    }

    fn after_gradient<F: ?Sized>(&mut self, x: &Array2<T>, g: &Array2<T>) -> Result<(), Stop> {
        if g.dim() != x.dim() {
            return Err(Stop::Contract(Diagnostic::shape_mismatch(
                std::any::type_name::<F>(),
                "gradient returned the wrong shape",
                x.dim(),
                g.dim(),
            )));
        }
        self.notify(&Event::GradientCalled { norm: inf_norm(g) })
    }

    pub(crate) fn evaluate<F: Function<T> + ?Sized>(
        &mut self,
        f: &F,
        x: &Array2<T>,
    ) -> Result<T, Stop> {
        self.guard()?;
        let value = f.evaluate(x);
        self.evaluate_calls += f.calls_per_evaluate();
        self.after_evaluate(value)?;
        Ok(value)
    }

    pub(crate) fn gradient<F: Differentiable<T> + ?Sized>(
        &mut self,
        f: &F,
        x: &Array2<T>,
    ) -> Result<Array2<T>, Stop> {
        self.guard()?;
        let g = f.gradient(x);
        self.gradient_calls += f.calls_per_gradient();
        self.after_gradient::<F>(x, &g)?;
        Ok(g)
    }

    pub(crate) fn evaluate_with_gradient<F: Differentiable<T> + ?Sized>(
        &mut self,
        f: &F,
        x: &Array2<T>,
    ) -> Result<(T, Array2<T>), Stop> {
        self.guard()?;
        let (value, g) = f.evaluate_with_gradient(x);
        self.evaluate_calls += f.calls_per_evaluate();
        self.gradient_calls += f.calls_per_gradient();
        let evaluated = self.after_evaluate(value);
        let shape = self.after_gradient::<F>(x, &g);
        match (evaluated, shape) {
            (_, Err(Stop::Contract(d))) => Err(Stop::Contract(d)),
            (Err(stop), _) | (_, Err(stop)) => Err(stop),
            _ => Ok((value, g)),
        }
    }

    pub(crate) fn evaluate_batch<F: SeparableDifferentiable<T> + ?Sized>(
        &mut self,
        f: &F,
        x: &Array2<T>,
        begin: usize,
        size: usize,
    ) -> Result<T, Stop> {
        self.guard()?;
        let value = f.evaluate_batch(x, begin, size);
        self.evaluate_calls += size;
        self.after_evaluate(value)?;
        Ok(value)
    }

    pub(crate) fn evaluate_with_gradient_batch<F: SeparableDifferentiable<T> + ?Sized>(
        &mut self,
        f: &F,
        x: &Array2<T>,
        begin: usize,
        size: usize,
    ) -> Result<(T, Array2<T>), Stop> {
        self.guard()?;
        let (value, g) = f.evaluate_with_gradient_batch(x, begin, size);
        self.evaluate_calls += size;
        self.gradient_calls += size;
        let evaluated = self.after_evaluate(value);
        let shape = self.after_gradient::<F>(x, &g);
        match (evaluated, shape) {
            (_, Err(Stop::Contract(d))) => Err(Stop::Contract(d)),
            (Err(stop), _) | (_, Err(stop)) => Err(stop),
            _ => Ok((value, g)),
        }
    }

    pub(crate) fn halted(&self) -> bool {
        self.halted
    }

    /// Delivers `EndOptimization` and assembles the result.
    pub(crate) fn finish(
        self,
        final_objective: T,
        iterations: usize,
        termination: TerminationReason,
    ) -> OptimizationResult<T> {
        let _ = dispatch(self.callbacks, &Event::EndOptimization);
        OptimizationResult {
            final_objective,
            iterations,
            termination,
            elapsed_seconds: self.start.elapsed().as_secs_f64(),
            evaluate_calls: self.evaluate_calls,
            gradient_calls: self.gradient_calls,
        }
    }
}

/// Turns a stop during setup into either an early result or an error.
pub(crate) fn setup_stop<T: Element>(
    session: Session<'_, '_, T>,
    stop: Stop,
) -> Result<OptimizationResult<T>, OptimError> {
    match stop {
        Stop::Halt => Ok(session.finish(T::nan(), 0, TerminationReason::CallbackRequested)),
        Stop::Contract(d) => Err(d.into()),
    }
}
