//! Generic numerical optimization over user-supplied objective functions.
//!
//! An objective implements only the methods it has ([`Function`],
//! [`Differentiable`], [`Separable`], [`SeparableDifferentiable`]); each
//! optimizer states what it needs through trait bounds, so a missing method
//! is a compile error that names it. Objectives whose method set is known only
//! at runtime ([`DynObjective`]) are checked before the first call and fail
//! with a [`Diagnostic`].
//!
//! ```
//! use ndarray::{array, Array2};
//! use optkit::{Differentiable, Function, Lbfgs, TerminationReason};
//!
//! struct Bowl;
//!
//! impl Function<f64> for Bowl {
//!     fn evaluate(&self, x: &Array2<f64>) -> f64 {
//!         x.iter().map(|v| (v - 1.0) * (v - 1.0)).sum()
//!     }
//! }
//!
//! impl Differentiable<f64> for Bowl {
//!     fn gradient(&self, x: &Array2<f64>) -> Array2<f64> {
//!         x.mapv(|v| 2.0 * (v - 1.0))
//!     }
//! }
//!
//! let mut x = array![[4.0], [-2.0]];
//! let result = Lbfgs::default().optimize(&Bowl, &mut x, &mut []).unwrap();
//! assert_eq!(result.termination, TerminationReason::GradientNormTolerance);
//! assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-6));
//! ```

// `!(a > b)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod callbacks;
pub mod capabilities;
mod dynamic;
pub mod element;
mod gradcheck;
pub mod objective;
pub mod optimizers;
pub mod problems;
mod result;
mod session;

pub use callbacks::{Callback, CallbackError, Decision, Event};
pub use capabilities::{check_requirements, Diagnostic, Method, ObjectiveCapabilities};
pub use dynamic::DynObjective;
pub use element::{Element, ParameterMatrix};
pub use gradcheck::{default_step, finite_difference_gradient, max_relative_error};
pub use objective::{
    infer_evaluate_with_gradient, infer_full_evaluate, Differentiable, Function, MeanOfParts,
    Separable, SeparableDifferentiable, SumOfParts,
};
pub use optimizers::{
    GdConfig, GradientDescent, Lbfgs, LbfgsConfig, Optimizer, SaConfig, Sgd, SgdConfig,
    SimulatedAnnealing, UpdatePolicyKind,
};
pub use result::{OptimError, OptimizationResult, TerminationReason};
