//! Objectives assembled from closures at runtime.

use std::fmt;

use ndarray::Array2;

use crate::capabilities::{Diagnostic, Method, ObjectiveCapabilities};
use crate::element::Element;
use crate::objective::{Differentiable, Function, Separable, SeparableDifferentiable};

type EvalFn<T> = Box<dyn Fn(&Array2<T>) -> T + Send + Sync>;
type GradFn<T> = Box<dyn Fn(&Array2<T>) -> Array2<T> + Send + Sync>;
type FusedFn<T> = Box<dyn Fn(&Array2<T>) -> (T, Array2<T>) + Send + Sync>;
type PartEvalFn<T> = Box<dyn Fn(&Array2<T>, usize) -> T + Send + Sync>;
type PartGradFn<T> = Box<dyn Fn(&Array2<T>, usize) -> Array2<T> + Send + Sync>;

/// An objective whose method set is decided at runtime.
///
/// The type implements every objective trait, so it can be handed to any
/// optimizer; which methods actually exist is reported through
/// [`Function::capabilities`] and checked by the optimizer before its first
/// call. Missing methods that can be inferred are: the full evaluate and
/// gradient from per-part closures, and the fused call from evaluate plus
/// gradient.
///
/// ```
/// use ndarray::array;
/// use optkit::{DynObjective, Lbfgs};
///
/// let f = DynObjective::<f64>::new().with_evaluate(|x| x.iter().map(|v| v * v).sum());
/// let mut x = array![[1.0], [2.0]];
/// let err = Lbfgs::default().optimize(&f, &mut x, &mut []).unwrap_err();
/// assert!(err.to_string().contains("gradient"));
/// ```
pub struct DynObjective<T: Element> {
    evaluate: Option<EvalFn<T>>,
    gradient: Option<GradFn<T>>,
    fused: Option<FusedFn<T>>,
    parts: Option<(usize, PartEvalFn<T>)>,
    part_gradient: Option<PartGradFn<T>>,
}

impl<T: Element> Default for DynObjective<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Element> fmt::Debug for DynObjective<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DynObjective")
            .field("capabilities", &self.descriptor())
            .finish()
    }
}

impl<T: Element> DynObjective<T> {
    pub fn new() -> Self {
        Self {
            evaluate: None,
            gradient: None,
            fused: None,
            parts: None,
            part_gradient: None,
        }
    }

    pub fn with_evaluate(mut self, f: impl Fn(&Array2<T>) -> T + Send + Sync + 'static) -> Self {
        self.evaluate = Some(Box::new(f));
        self
    }

    pub fn with_gradient(
        mut self,
        g: impl Fn(&Array2<T>) -> Array2<T> + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Box::new(g));
        self
    }

    pub fn with_evaluate_with_gradient(
        mut self,
        fg: impl Fn(&Array2<T>) -> (T, Array2<T>) + Send + Sync + 'static,
    ) -> Self {
        self.fused = Some(Box::new(fg));
        self
    }

    /// Declares `num_functions` parts; `part(x, i)` evaluates `f_i(x)`.
    pub fn with_parts(
        mut self,
        num_functions: usize,
        part: impl Fn(&Array2<T>, usize) -> T + Send + Sync + 'static,
    ) -> Self {
        self.parts = Some((num_functions, Box::new(part)));
        self
    }

    /// `part_gradient(x, i)` returns the gradient of `f_i` at `x`.
    pub fn with_part_gradient(
        mut self,
        part_gradient: impl Fn(&Array2<T>, usize) -> Array2<T> + Send + Sync + 'static,
    ) -> Self {
        self.part_gradient = Some(Box::new(part_gradient));
        self
    }

    pub fn descriptor(&self) -> ObjectiveCapabilities {
        ObjectiveCapabilities {
            has_evaluate: self.evaluate.is_some(),
            has_gradient: self.gradient.is_some(),
            has_fused_evaluate_with_gradient: self.fused.is_some(),
            is_separable: self.parts.is_some(),
            has_separable_gradient: self.part_gradient.is_some(),
            num_functions: self.parts.as_ref().map(|(n, _)| *n),
        }
    }

    fn unavailable(&self, method: Method) -> ! {
        panic!(
            "{method} called on a DynObjective that neither provides nor can infer it \
             (capabilities: {:?})",
            self.descriptor()
        )
    }

    fn part_sum(&self, x: &Array2<T>, begin: usize, size: usize) -> Option<T> {
        let (_, part) = self.parts.as_ref()?;
        Some((begin..begin + size).fold(T::zero(), |acc, i| acc + part(x, i)))
    }

    fn part_gradient_sum(&self, x: &Array2<T>, begin: usize, size: usize) -> Option<Array2<T>> {
        let pg = self.part_gradient.as_ref()?;
        let mut acc = Array2::zeros(x.dim());
        for i in begin..begin + size {
            acc += &pg(x, i);
        }
        Some(acc)
    }

    fn num_parts(&self) -> usize {
        self.parts.as_ref().map_or(0, |(n, _)| *n)
    }
}

impl<T: Element> Function<T> for DynObjective<T> {
    fn evaluate(&self, x: &Array2<T>) -> T {
        if let Some(f) = &self.evaluate {
            return f(x);
        }
        if let Some(fg) = &self.fused {
            return fg(x).0;
        }
        self.part_sum(x, 0, self.num_parts())
            .unwrap_or_else(|| self.unavailable(Method::Evaluate))
    }

    fn capabilities(&self) -> Option<ObjectiveCapabilities> {
        Some(self.descriptor())
    }

    fn calls_per_evaluate(&self) -> usize {
        if self.evaluate.is_some() || self.fused.is_some() {
            1
        } else {
            self.num_parts()
        }
    }
}

impl<T: Element> Differentiable<T> for DynObjective<T> {
    fn gradient(&self, x: &Array2<T>) -> Array2<T> {
        if let Some(g) = &self.gradient {
            return g(x);
        }
        if let Some(fg) = &self.fused {
            return fg(x).1;
        }
        self.part_gradient_sum(x, 0, self.num_parts())
            .unwrap_or_else(|| self.unavailable(Method::Gradient))
    }

    fn evaluate_with_gradient(&self, x: &Array2<T>) -> (T, Array2<T>) {
        match &self.fused {
            Some(fg) => fg(x),
            None => (self.evaluate(x), self.gradient(x)),
        }
    }

    fn calls_per_gradient(&self) -> usize {
        if self.gradient.is_some() || self.fused.is_some() {
            1
        } else {
            self.num_parts()
        }
    }
}

impl<T: Element> Separable<T> for DynObjective<T> {
    fn num_functions(&self) -> usize {
        self.num_parts()
    }

    fn evaluate_batch(&self, x: &Array2<T>, begin: usize, size: usize) -> T {
        self.part_sum(x, begin, size)
            .unwrap_or_else(|| self.unavailable(Method::SeparableEvaluate))
    }

    fn capabilities(&self) -> Option<ObjectiveCapabilities> {
        Some(self.descriptor())
    }
}

impl<T: Element> SeparableDifferentiable<T> for DynObjective<T> {
    fn gradient_batch(&self, x: &Array2<T>, begin: usize, size: usize) -> Array2<T> {
        self.part_gradient_sum(x, begin, size)
            .unwrap_or_else(|| self.unavailable(Method::SeparableGradient))
    }
}

/// Returns the diagnostic an optimizer would raise for `obj`, if any.
pub(crate) fn check_runtime_capabilities(
    caps: Option<ObjectiveCapabilities>,
    required: &ObjectiveCapabilities,
    optimizer: &str,
) -> Result<(), Diagnostic> {
    match caps {
        Some(caps) => crate::capabilities::check_requirements(&caps, required, optimizer),
        None => Ok(()),
    }
}
