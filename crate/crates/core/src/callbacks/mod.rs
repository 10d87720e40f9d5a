//! Hooks invoked by every optimizer; any hook may end the run.
//!
//! Optimizers report [`Event`]s to an ordered list of callbacks through
//! [`dispatch`]. All callbacks see every event; the run stops if any of them
//! returns [`Decision::Terminate`], and no objective method is called after
//! that.

mod builtin;

pub use builtin::{
    parse_progress_line, EarlyStopping, MaxTime, ProgressLine, ProgressPrinter, TraceRecorder,
};

use std::error::Error;

use ndarray::Array2;

use crate::element::Element;

/// Something that happened during a run.
#[derive(Debug, Clone, Copy)]
pub enum Event<'a, T: Element> {
    BeginOptimization,
    EndOptimization,
    /// An objective evaluation returned `value`.
    EvaluateCalled {
        value: T,
    },
    /// A gradient was computed; `norm` is its infinity norm.
    GradientCalled {
        norm: T,
    },
    /// Iteration `iteration` (1-based) finished at `iterate`.
    StepTaken {
        iteration: usize,
        objective: T,
        gradient_norm: Option<T>,
        iterate: &'a Array2<T>,
    },
    BeginEpoch {
        epoch: usize,
    },
    EndEpoch {
        epoch: usize,
        mean_objective: T,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Continue,
    Terminate,
}

pub type CallbackError = Box<dyn Error + Send + Sync>;

/// An optimization hook.
pub trait Callback<T: Element> {
    fn on_event(&mut self, event: &Event<'_, T>) -> Result<Decision, CallbackError>;
}

impl<T, F> Callback<T> for F
where
    T: Element,
    F: FnMut(&Event<'_, T>) -> Decision,
{
    fn on_event(&mut self, event: &Event<'_, T>) -> Result<Decision, CallbackError> {
        Ok(self(event))
    }
}

/// Delivers `event` to every callback in order.
///
/// Returns `Terminate` iff at least one callback asked for it. A callback
/// error is logged and counts as `Continue`.
pub fn dispatch<T: Element>(
    callbacks: &mut [&mut dyn Callback<T>],
    event: &Event<'_, T>,
) -> Decision {
    let mut decision = Decision::Continue;
    for (index, cb) in callbacks.iter_mut().enumerate() {
        match cb.on_event(event) {
            Ok(Decision::Terminate) => decision = Decision::Terminate,
            Ok(Decision::Continue) => {}
            Err(err) => log::warn!("callback {index} failed: {err}"),
        }
    }
    decision
}
