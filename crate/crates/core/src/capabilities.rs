//! Capability descriptors and requirement checking.
//!
//! Statically typed objectives are checked by the trait system at compile
//! time. Objectives whose method set is only known at runtime (see
//! [`DynObjective`](crate::DynObjective)) report an [`ObjectiveCapabilities`]
//! descriptor instead and are checked by [`check_requirements`] before the
//! optimizer makes its first call.

use std::fmt;

use thiserror::Error;

/// An objective method an optimizer may require.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Evaluate,
    Gradient,
    EvaluateWithGradient,
    SeparableEvaluate,
    SeparableGradient,
}

impl Method {
    /// Name of the trait method implementing this capability.
    pub fn name(self) -> &'static str {
        match self {
            Method::Evaluate => "evaluate",
            Method::Gradient => "gradient",
            Method::EvaluateWithGradient => "evaluate_with_gradient",
            Method::SeparableEvaluate => "evaluate_batch",
            Method::SeparableGradient => "gradient_batch",
        }
    }

    const ALL: [Method; 5] = [
        Method::Evaluate,
        Method::Gradient,
        Method::EvaluateWithGradient,
        Method::SeparableEvaluate,
        Method::SeparableGradient,
    ];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which methods an objective provides.
///
/// `has_evaluate`, `has_gradient` and `has_fused_evaluate_with_gradient` refer
/// to the full objective; `is_separable` and `has_separable_gradient` to the
/// per-part methods over index windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ObjectiveCapabilities {
    pub has_evaluate: bool,
    pub has_gradient: bool,
    pub has_fused_evaluate_with_gradient: bool,
    pub is_separable: bool,
    pub has_separable_gradient: bool,
    /// Number of separable parts; `Some` iff `is_separable`.
    pub num_functions: Option<usize>,
}

impl ObjectiveCapabilities {
    pub const NONE: Self = Self {
        has_evaluate: false,
        has_gradient: false,
        has_fused_evaluate_with_gradient: false,
        is_separable: false,
        has_separable_gradient: false,
        num_functions: None,
    };

    /// Requirement set of gradient-free optimizers.
    pub const EVALUATE: Self = Self {
        has_evaluate: true,
        ..Self::NONE
    };

    /// Requirement set of full-batch first-order optimizers.
    pub const DIFFERENTIABLE: Self = Self {
        has_evaluate: true,
        has_gradient: true,
        ..Self::NONE
    };

    /// Requirement set of mini-batch optimizers.
    pub const SEPARABLE_DIFFERENTIABLE: Self = Self {
        is_separable: true,
        has_separable_gradient: true,
        ..Self::NONE
    };

    pub fn with_fused(mut self) -> Self {
        self.has_fused_evaluate_with_gradient = true;
        self
    }

    pub fn separable(num_functions: usize) -> Self {
        Self {
            is_separable: true,
            num_functions: Some(num_functions),
            ..Self::NONE
        }
    }

    /// Checks the descriptor invariants.
    pub fn validate(&self) -> Result<(), Diagnostic> {
        match (self.is_separable, self.num_functions) {
            (true, Some(n)) if n >= 1 => {}
            (true, _) => {
                return Err(Diagnostic::new(
                    "evaluate_batch provided but num_functions is not >= 1",
                    vec![Method::SeparableEvaluate],
                ))
            }
            (false, Some(_)) => {
                return Err(Diagnostic::new(
                    "num_functions reported without evaluate_batch",
                    vec![Method::SeparableEvaluate],
                ))
            }
            (false, None) => {}
        }
        if self.has_separable_gradient && !self.is_separable {
            return Err(Diagnostic::new(
                "gradient_batch provided without evaluate_batch",
                vec![Method::SeparableEvaluate],
            ));
        }
        Ok(())
    }

    fn flag(&self, method: Method) -> bool {
        match method {
            Method::Evaluate => self.has_evaluate,
            Method::Gradient => self.has_gradient,
            Method::EvaluateWithGradient => self.has_fused_evaluate_with_gradient,
            Method::SeparableEvaluate => self.is_separable,
            Method::SeparableGradient => self.has_separable_gradient,
        }
    }

    /// Whether `method` is provided directly or can be inferred.
    ///
    /// Inference rules: the full evaluate (and gradient) is the sum over
    /// separable parts; the fused call is evaluate followed by gradient.
    pub fn provides(&self, method: Method) -> bool {
        match method {
            Method::Evaluate => self.has_evaluate || self.is_separable,
            Method::Gradient => self.has_gradient || self.has_separable_gradient,
            Method::EvaluateWithGradient => {
                self.has_fused_evaluate_with_gradient
                    || (self.provides(Method::Evaluate) && self.provides(Method::Gradient))
            }
            Method::SeparableEvaluate => self.is_separable,
            Method::SeparableGradient => self.has_separable_gradient,
        }
    }
}

/// A requirement-check failure naming the missing methods.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct Diagnostic {
    message: String,
    missing: Vec<Method>,
}

impl Diagnostic {
    pub fn new(message: impl Into<String>, missing: Vec<Method>) -> Self {
        Self {
            message: message.into(),
            missing,
        }
    }

    pub fn message(&self) -> &str {
        &self.message
    }

    /// Methods whose absence caused the failure (empty for contract violations).
    pub fn missing(&self) -> &[Method] {
        &self.missing
    }

    pub(crate) fn shape_mismatch(
        objective: &str,
        what: &str,
        expected: (usize, usize),
        got: (usize, usize),
    ) -> Self {
        Self::new(
            format!(
                "objective `{objective}` {what}: expected shape {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            Vec::new(),
        )
    }
}

/// Checks that every capability in `required` is present in `caps` or inferable.
///
/// On failure the diagnostic lists each missing method together with the
/// optimizer that demanded it.
pub fn check_requirements(
    caps: &ObjectiveCapabilities,
    required: &ObjectiveCapabilities,
    optimizer: &str,
) -> Result<(), Diagnostic> {
    caps.validate()?;
    let missing: Vec<Method> = Method::ALL
        .into_iter()
        .filter(|&m| required.flag(m) && !caps.provides(m))
        .collect();
    if missing.is_empty() {
        return Ok(());
    }
    let message = missing
        .iter()
        .map(|m| format!("{m} required by {optimizer}, not provided and not inferable"))
        .collect::<Vec<_>>()
        .join("; ");
    Err(Diagnostic::new(message, missing))
}
