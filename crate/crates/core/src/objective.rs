//! Objective-function contracts and the adapters that infer missing methods.
//!
//! An objective implements the smallest trait set its optimizer needs:
//!
//! * [`Function`]: `evaluate` only (simulated annealing).
//! * [`Differentiable`]: `evaluate` + `gradient` (L-BFGS, gradient descent).
//!   `evaluate_with_gradient` is inferred unless overridden.
//! * [`Separable`] / [`SeparableDifferentiable`]: sums of `num_functions`
//!   parts evaluated over contiguous index windows (SGD and its variants).
//!
//! [`SumOfParts`] infers the full objective from a separable one and
//! [`MeanOfParts`] infers the averaged objective that mini-batch optimizers
//! descend.

use ndarray::Array2;

use crate::capabilities::{Diagnostic, ObjectiveCapabilities};
use crate::element::{average_in_place, Element};

/// An objective that can be evaluated.
#[diagnostic::on_unimplemented(
    message = "`{Self}` does not provide `evaluate`, required by this optimizer",
    label = "evaluate required here, not provided and not inferable",
    note = "implement `Function::evaluate`; for a separable objective, wrap it in `SumOfParts` to infer the full evaluate"
)]
pub trait Function<T: Element> {
    fn evaluate(&self, x: &Array2<T>) -> T;

    /// Validates the shape of a starting point before any evaluation.
    fn check_point(&self, _x: &Array2<T>) -> Result<(), Diagnostic> {
        Ok(())
    }

    /// Runtime capability descriptor; `None` when the method set is fixed by
    /// the type and therefore already checked by the compiler.
    fn capabilities(&self) -> Option<ObjectiveCapabilities> {
        None
    }

    /// Number of user-level calls one `evaluate` triggers.
    fn calls_per_evaluate(&self) -> usize {
        1
    }
}

/// An objective that also provides its gradient.
#[diagnostic::on_unimplemented(
    message = "`{Self}` does not provide `gradient`, required by this optimizer",
    label = "gradient required here, not provided and not inferable",
    note = "implement `Differentiable::gradient`; a gradient cannot be inferred from `evaluate` alone"
)]
pub trait Differentiable<T: Element>: Function<T> {
    /// Gradient at `x`, with the same shape as `x`.
    fn gradient(&self, x: &Array2<T>) -> Array2<T>;

    /// Objective and gradient in one call.
    fn evaluate_with_gradient(&self, x: &Array2<T>) -> (T, Array2<T>) {
        (self.evaluate(x), self.gradient(x))
    }

    fn calls_per_gradient(&self) -> usize {
        1
    }
}

/// A sum of `num_functions` parts `f_i(x)`.
#[diagnostic::on_unimplemented(
    message = "`{Self}` does not provide `evaluate_batch`, required by this optimizer",
    label = "separable objective required here",
    note = "implement `Separable`; per-part evaluation cannot be inferred from the full objective"
)]
pub trait Separable<T: Element> {
    fn num_functions(&self) -> usize;

    /// Sum of parts `begin..begin + size`.
    fn evaluate_batch(&self, x: &Array2<T>, begin: usize, size: usize) -> T;

    fn check_point(&self, _x: &Array2<T>) -> Result<(), Diagnostic> {
        Ok(())
    }

    fn capabilities(&self) -> Option<ObjectiveCapabilities> {
        None
    }
}

/// A separable objective with per-window gradients.
#[diagnostic::on_unimplemented(
    message = "`{Self}` does not provide `gradient_batch`, required by this optimizer",
    label = "separable gradient required here, not provided and not inferable",
    note = "implement `SeparableDifferentiable::gradient_batch`"
)]
pub trait SeparableDifferentiable<T: Element>: Separable<T> {
    /// Gradient of the sum of parts `begin..begin + size`.
    fn gradient_batch(&self, x: &Array2<T>, begin: usize, size: usize) -> Array2<T>;

    fn evaluate_with_gradient_batch(
        &self,
        x: &Array2<T>,
        begin: usize,
        size: usize,
    ) -> (T, Array2<T>) {
        (
            self.evaluate_batch(x, begin, size),
            self.gradient_batch(x, begin, size),
        )
    }
}

impl<T: Element, F: Function<T> + ?Sized> Function<T> for &F {
    fn evaluate(&self, x: &Array2<T>) -> T {
        (**self).evaluate(x)
    }
    fn check_point(&self, x: &Array2<T>) -> Result<(), Diagnostic> {
        (**self).check_point(x)
    }
    fn capabilities(&self) -> Option<ObjectiveCapabilities> {
        (**self).capabilities()
    }
    fn calls_per_evaluate(&self) -> usize {
        (**self).calls_per_evaluate()
    }
}

impl<T: Element, F: Differentiable<T> + ?Sized> Differentiable<T> for &F {
    fn gradient(&self, x: &Array2<T>) -> Array2<T> {
        (**self).gradient(x)
    }
    fn evaluate_with_gradient(&self, x: &Array2<T>) -> (T, Array2<T>) {
        (**self).evaluate_with_gradient(x)
    }
    fn calls_per_gradient(&self) -> usize {
        (**self).calls_per_gradient()
    }
}

impl<T: Element, S: Separable<T> + ?Sized> Separable<T> for &S {
    fn num_functions(&self) -> usize {
        (**self).num_functions()
    }
    fn evaluate_batch(&self, x: &Array2<T>, begin: usize, size: usize) -> T {
        (**self).evaluate_batch(x, begin, size)
    }
    fn check_point(&self, x: &Array2<T>) -> Result<(), Diagnostic> {
        Separable::check_point(&**self, x)
    }
    fn capabilities(&self) -> Option<ObjectiveCapabilities> {
        Separable::capabilities(&**self)
    }
}

impl<T: Element, S: SeparableDifferentiable<T> + ?Sized> SeparableDifferentiable<T> for &S {
    fn gradient_batch(&self, x: &Array2<T>, begin: usize, size: usize) -> Array2<T> {
        (**self).gradient_batch(x, begin, size)
    }
    fn evaluate_with_gradient_batch(
        &self,
        x: &Array2<T>,
        begin: usize,
        size: usize,
    ) -> (T, Array2<T>) {
        (**self).evaluate_with_gradient_batch(x, begin, size)
    }
}

/// Sum `f_0(x) + ... + f_{n-1}(x)`, accumulated in ascending index order.
///
/// Each part is evaluated with its own one-element window, so the result is
/// independent of how the objective batches internally and is bit-identical
/// across calls.
pub fn infer_full_evaluate<T: Element, S: Separable<T> + ?Sized>(parts: &S, x: &Array2<T>) -> T {
    (0..parts.num_functions()).fold(T::zero(), |acc, i| acc + parts.evaluate_batch(x, i, 1))
}

/// `(evaluate(x), gradient(x))` for an objective that provides both separately.
pub fn infer_evaluate_with_gradient<T: Element, F: Differentiable<T> + ?Sized>(
    obj: &F,
    x: &Array2<T>,
) -> Result<(T, Array2<T>), Diagnostic> {
    let value = obj.evaluate(x);
    let grad = obj.gradient(x);
    if grad.dim() != x.dim() {
        return Err(Diagnostic::shape_mismatch(
            std::any::type_name::<F>(),
            "gradient returned the wrong shape",
            x.dim(),
            grad.dim(),
        ));
    }
    Ok((value, grad))
}

/// Full objective inferred from a separable one.
///
/// `evaluate` sums the parts one at a time; `gradient` is the gradient of the
/// full window `0..n`. One call counts as `n` underlying calls.
#[derive(Debug, Clone, Copy)]
pub struct SumOfParts<S>(pub S);

impl<T: Element, S: Separable<T>> Function<T> for SumOfParts<S> {
    fn evaluate(&self, x: &Array2<T>) -> T {
        infer_full_evaluate(&self.0, x)
    }
    fn check_point(&self, x: &Array2<T>) -> Result<(), Diagnostic> {
        self.0.check_point(x)
    }
    fn capabilities(&self) -> Option<ObjectiveCapabilities> {
        self.0.capabilities()
    }
    fn calls_per_evaluate(&self) -> usize {
        self.0.num_functions()
    }
}

impl<T: Element, S: SeparableDifferentiable<T>> Differentiable<T> for SumOfParts<S> {
    fn gradient(&self, x: &Array2<T>) -> Array2<T> {
        self.0.gradient_batch(x, 0, self.0.num_functions())
    }
    fn calls_per_gradient(&self) -> usize {
        self.0.num_functions()
    }
}

/// Mean `(1/n) * sum_i f_i(x)` of a separable objective.
///
/// This is the objective mini-batch optimizers descend: its gradient is the
/// full-window gradient averaged exactly as a full batch would be.
#[derive(Debug, Clone, Copy)]
pub struct MeanOfParts<S>(pub S);

impl<T: Element, S: Separable<T>> Function<T> for MeanOfParts<S> {
    fn evaluate(&self, x: &Array2<T>) -> T {
        infer_full_evaluate(&self.0, x) / T::of(self.0.num_functions() as f64)
    }
    fn check_point(&self, x: &Array2<T>) -> Result<(), Diagnostic> {
        self.0.check_point(x)
    }
    fn capabilities(&self) -> Option<ObjectiveCapabilities> {
        self.0.capabilities()
    }
    fn calls_per_evaluate(&self) -> usize {
        self.0.num_functions()
    }
}

impl<T: Element, S: SeparableDifferentiable<T>> Differentiable<T> for MeanOfParts<S> {
    fn gradient(&self, x: &Array2<T>) -> Array2<T> {
        let n = self.0.num_functions();
        let mut g = self.0.gradient_batch(x, 0, n);
        average_in_place(&mut g, n);
        g
    }
    fn calls_per_gradient(&self) -> usize {
        self.0.num_functions()
    }
}
