use std::ops::Range;

use ndarray::{Array1, Array2};

use crate::capabilities::{Diagnostic, Method};
use crate::element::Element;
use crate::objective::{Differentiable, Function, Separable, SeparableDifferentiable};

use super::{check_column_point, samples_from_predictors};

/// Least squares `f(phi) = |X' phi - y|^2` with predictors `X` (`d x n`,
/// one sample per column) and responses `y` (length `n`).
///
/// This type implements only `evaluate` and `gradient`; the per-sample view
/// used by mini-batch optimizers is [`LinearRegression::separable`].
#[derive(Debug, Clone)]
pub struct LinearRegression<T: Element> {
    /// Samples as rows (`n x d`).
    samples: Array2<T>,
    responses: Array1<T>,
}

impl<T: Element> LinearRegression<T> {
    pub fn new(predictors: Array2<T>, responses: Array1<T>) -> Result<Self, Diagnostic> {
        let samples = samples_from_predictors("LinearRegression", predictors, responses.len())?;
        Ok(Self { samples, responses })
    }

    pub fn dim(&self) -> usize {
        self.samples.ncols()
    }

    pub fn num_samples(&self) -> usize {
        self.samples.nrows()
    }

    /// Per-sample view with `num_functions() == n`.
    pub fn separable(&self) -> SeparableLinearRegression<'_, T> {
        SeparableLinearRegression { inner: self }
    }

    fn residual(&self, phi: &[T], i: usize) -> T {
        let row = self.samples.row(i);
        row.iter()
            .zip(phi)
            .fold(T::zero(), |acc, (&x, &p)| acc + x * p)
            - self.responses[i]
    }

    fn sum_of_squares(&self, phi: &Array2<T>, samples: Range<usize>) -> T {
        let phi = column(phi);
        samples.fold(T::zero(), |acc, i| {
            let r = self.residual(&phi, i);
            acc + r * r
        })
    }

    fn gradient_over(&self, phi: &Array2<T>, samples: Range<usize>) -> Array2<T> {
        let p = column(phi);
        let mut g = Array2::zeros((self.dim(), 1));
        let two = T::of(2.0);
        for i in samples {
            let c = two * self.residual(&p, i);
            for (gj, &xj) in g.iter_mut().zip(self.samples.row(i)) {
                *gj += c * xj;
            }
        }
        g
    }

    /// Validates a sample window `begin..begin + size`.
    pub fn window(&self, begin: usize, size: usize) -> Result<Range<usize>, Diagnostic> {
        match begin.checked_add(size) {
            Some(end) if end <= self.num_samples() => Ok(begin..end),
            _ => Err(Diagnostic::new(
                format!(
                    "evaluate_batch window {begin}..{} out of range for {} parts",
                    begin.saturating_add(size),
                    self.num_samples()
                ),
                vec![Method::SeparableEvaluate],
            )),
        }
    }
}

/// Parameter column as a contiguous vector.
fn column<T: Element>(phi: &Array2<T>) -> Vec<T> {
    phi.iter().copied().collect()
}

impl<T: Element> Function<T> for LinearRegression<T> {
    fn evaluate(&self, phi: &Array2<T>) -> T {
        self.sum_of_squares(phi, 0..self.num_samples())
    }

    fn check_point(&self, phi: &Array2<T>) -> Result<(), Diagnostic> {
        check_column_point("LinearRegression", phi, self.dim())
    }
}

impl<T: Element> Differentiable<T> for LinearRegression<T> {
    fn gradient(&self, phi: &Array2<T>) -> Array2<T> {
        self.gradient_over(phi, 0..self.num_samples())
    }
}

/// Parts `f_i(phi) = (x_i' phi - y_i)^2` of a [`LinearRegression`].
///
/// Summation over a window follows ascending sample order, so the full
/// window reproduces [`LinearRegression`]'s `evaluate` and `gradient` bit
/// for bit.
#[derive(Debug, Clone, Copy)]
pub struct SeparableLinearRegression<'a, T: Element> {
    inner: &'a LinearRegression<T>,
}

impl<T: Element> Separable<T> for SeparableLinearRegression<'_, T> {
    fn num_functions(&self) -> usize {
        self.inner.num_samples()
    }

    /// # Panics
    /// If the window is out of range.
    fn evaluate_batch(&self, phi: &Array2<T>, begin: usize, size: usize) -> T {
        let window = self
            .inner
            .window(begin, size)
            .unwrap_or_else(|d| panic!("{d}"));
        self.inner.sum_of_squares(phi, window)
    }

    fn check_point(&self, phi: &Array2<T>) -> Result<(), Diagnostic> {
        check_column_point("LinearRegression", phi, self.inner.dim())
    }
}

impl<T: Element> SeparableDifferentiable<T> for SeparableLinearRegression<'_, T> {
    fn gradient_batch(&self, phi: &Array2<T>, begin: usize, size: usize) -> Array2<T> {
        let window = self
            .inner
            .window(begin, size)
            .unwrap_or_else(|d| panic!("{d}"));
        self.inner.gradient_over(phi, window)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn tiny() -> LinearRegression<f64> {
        LinearRegression::new(array![[1.0, 2.0]], array![1.0, 2.0]).unwrap()
    }

    #[test]
    fn hand_evaluated_instance() {
        let f = tiny();
        let phi = array![[0.0]];
        assert_eq!(f.evaluate(&phi), 5.0);
        assert_eq!(f.gradient(&phi), array![[-10.0]]);
        let parts = f.separable();
        assert_eq!(parts.evaluate_batch(&phi, 0, 1), 1.0);
        assert_eq!(parts.evaluate_batch(&phi, 1, 1), 4.0);
        assert_eq!(parts.evaluate_batch(&phi, 0, 2), f.evaluate(&phi));
    }

    #[test]
    fn exact_fit_has_zero_residual() {
        let f = tiny();
        assert_eq!(f.evaluate(&array![[1.0]]), 0.0);
        assert_eq!(f.separable().evaluate_batch(&array![[1.0]], 1, 1), 0.0);
        let zero = LinearRegression::new(array![[1.0, 2.0]], array![0.0, 0.0]).unwrap();
        assert_eq!(zero.evaluate(&array![[0.0]]), 0.0);
    }

    #[test]
    fn shape_errors() {
        assert!(LinearRegression::new(array![[1.0, 2.0]], array![1.0]).is_err());
        let f = tiny();
        let err = f.check_point(&array![[0.0], [0.0]]).unwrap_err();
        assert!(err.message().contains("evaluate"));
        assert!(f.window(1, 2).is_err());
        assert!(f.window(0, 2).is_ok());
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn out_of_range_window_panics() {
        let f = tiny();
        f.separable().evaluate_batch(&array![[0.0]], 2, 1);
    }
}
