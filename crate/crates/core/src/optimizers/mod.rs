//! Pre-built optimizers.
//!
//! Every optimizer is a plain configuration value with an inherent
//! `optimize(&f, &mut x, callbacks)` method whose trait bound states what the
//! objective must provide. New optimizers plug in by implementing
//! [`Optimizer`].

mod gradient_descent;
mod lbfgs;
mod line_search;
mod sgd;
mod simulated_annealing;
mod update;

pub use gradient_descent::{GdConfig, GradientDescent};
pub use lbfgs::{Lbfgs, LbfgsConfig, LbfgsMemory};
pub use line_search::{ArmijoBacktracking, LineSearchError, LineSearchStep, MIN_STEP};
pub use sgd::{Sgd, SgdConfig};
pub use simulated_annealing::{metropolis_accepts, SaConfig, SimulatedAnnealing};
pub use update::{AdamUpdate, MomentumUpdate, UpdatePolicy, UpdatePolicyKind, VanillaUpdate};

use ndarray::Array2;

use crate::callbacks::Callback;
use crate::capabilities::{Diagnostic, ObjectiveCapabilities};
use crate::dynamic::check_runtime_capabilities;
use crate::element::{all_finite, Element};
use crate::result::{OptimError, OptimizationResult};

/// An optimizer usable with objectives of type `F`.
pub trait Optimizer<T: Element, F: ?Sized> {
    fn name(&self) -> &'static str;

    /// Methods the objective must provide or allow to be inferred.
    fn requirements(&self) -> ObjectiveCapabilities;

    fn optimize(
        &self,
        f: &F,
        x: &mut Array2<T>,
        callbacks: &mut [&mut dyn Callback<T>],
    ) -> Result<OptimizationResult<T>, OptimError>;
}

/// Checks run before the first objective call.
pub(crate) fn prepare<T: Element>(
    optimizer: &str,
    required: &ObjectiveCapabilities,
    caps: Option<ObjectiveCapabilities>,
    point_check: Result<(), Diagnostic>,
    x: &Array2<T>,
) -> Result<(), OptimError> {
    check_runtime_capabilities(caps, required, optimizer)?;
    point_check?;
    if !all_finite(x) {
        return Err(OptimError::NonFiniteStart);
    }
    Ok(())
}
