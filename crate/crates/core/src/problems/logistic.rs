use std::ops::Range;

use ndarray::{Array1, Array2};

use crate::capabilities::{Diagnostic, Method};
use crate::element::Element;
use crate::objective::{Differentiable, Function, Separable, SeparableDifferentiable};

use super::{check_column_point, samples_from_predictors};

/// Unregularized negative log-likelihood of binary logistic regression,
///
/// `f(phi) = sum_i softplus(z_i) - y_i z_i`, `z_i = x_i' phi`,
///
/// with labels `y_i` in `{0, 1}` and no intercept. An optional
/// `lambda |phi|^2` penalty is off by default. Each sample is one separable
/// part (the penalty is spread evenly across parts).
#[derive(Debug, Clone)]
pub struct LogisticRegression<T: Element> {
    samples: Array2<T>,
    labels: Array1<T>,
    l2: T,
}

impl<T: Element> LogisticRegression<T> {
    pub fn new(predictors: Array2<T>, labels: Array1<T>) -> Result<Self, Diagnostic> {
        if let Some((i, y)) = labels
            .iter()
            .enumerate()
            .find(|(_, &y)| y != T::zero() && y != T::one())
        {
            return Err(Diagnostic::new(
                format!("LogisticRegression evaluate needs labels in {{0, 1}}; label {i} is {y}"),
                vec![Method::Evaluate],
            ));
        }
        let samples = samples_from_predictors("LogisticRegression", predictors, labels.len())?;
        Ok(Self {
            samples,
            labels,
            l2: T::zero(),
        })
    }

    /// Adds `lambda |phi|^2` to the objective.
    pub fn with_l2(mut self, lambda: T) -> Self {
        self.l2 = lambda;
        self
    }

    pub fn dim(&self) -> usize {
        self.samples.ncols()
    }

    pub fn num_samples(&self) -> usize {
        self.samples.nrows()
    }

    fn margin(&self, phi: &[T], i: usize) -> T {
        self.samples
            .row(i)
            .iter()
            .zip(phi)
            .fold(T::zero(), |acc, (&x, &p)| acc + x * p)
    }

    fn penalty(&self, phi: &[T], size: usize) -> T {
        let sq = phi.iter().fold(T::zero(), |acc, &p| acc + p * p);
        self.l2 * sq * T::of(size as f64) / T::of(self.num_samples() as f64)
    }

    fn loss_over(&self, phi: &Array2<T>, samples: Range<usize>) -> T {
        let p: Vec<T> = phi.iter().copied().collect();
        let size = samples.len();
        let loss = samples.fold(T::zero(), |acc, i| {
            let z = self.margin(&p, i);
            let l = if self.labels[i] == T::one() {
                softplus(-z)
            } else {
                softplus(z)
            };
            acc + l
        });
        if self.l2 == T::zero() {
            loss
        } else {
            loss + self.penalty(&p, size)
        }
    }

    fn gradient_over(&self, phi: &Array2<T>, samples: Range<usize>) -> Array2<T> {
        let p: Vec<T> = phi.iter().copied().collect();
        let size = samples.len();
        let mut g = Array2::zeros((self.dim(), 1));
        for i in samples {
            let c = sigmoid(self.margin(&p, i)) - self.labels[i];
            for (gj, &xj) in g.iter_mut().zip(self.samples.row(i)) {
                *gj += c * xj;
            }
        }
        if self.l2 != T::zero() {
            let scale =
                T::of(2.0) * self.l2 * T::of(size as f64) / T::of(self.num_samples() as f64);
            for (gj, &pj) in g.iter_mut().zip(&p) {
                *gj += scale * pj;
            }
        }
        g
    }

    fn window(&self, begin: usize, size: usize) -> Range<usize> {
        match begin.checked_add(size) {
            Some(end) if end <= self.num_samples() => begin..end,
            _ => panic!(
                "evaluate_batch window {begin}..{} out of range for {} parts",
                begin.saturating_add(size),
                self.num_samples()
            ),
        }
    }
}

/// `log(1 + exp(z))` without overflow.
pub fn softplus<T: Element>(z: T) -> T {
    if z > T::zero() {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Logistic function, evaluated on the branch that cannot overflow.
pub fn sigmoid<T: Element>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

impl<T: Element> Function<T> for LogisticRegression<T> {
    fn evaluate(&self, phi: &Array2<T>) -> T {
        self.loss_over(phi, 0..self.num_samples())
    }

    fn check_point(&self, phi: &Array2<T>) -> Result<(), Diagnostic> {
        check_column_point("LogisticRegression", phi, self.dim())
    }
}

impl<T: Element> Differentiable<T> for LogisticRegression<T> {
    fn gradient(&self, phi: &Array2<T>) -> Array2<T> {
        self.gradient_over(phi, 0..self.num_samples())
    }
}

impl<T: Element> Separable<T> for LogisticRegression<T> {
    fn num_functions(&self) -> usize {
        self.num_samples()
    }

    fn evaluate_batch(&self, phi: &Array2<T>, begin: usize, size: usize) -> T {
        self.loss_over(phi, self.window(begin, size))
    }

    fn check_point(&self, phi: &Array2<T>) -> Result<(), Diagnostic> {
        check_column_point("LogisticRegression", phi, self.dim())
    }
}

impl<T: Element> SeparableDifferentiable<T> for LogisticRegression<T> {
    fn gradient_batch(&self, phi: &Array2<T>, begin: usize, size: usize) -> Array2<T> {
        self.gradient_over(phi, self.window(begin, size))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn zero_parameters_give_n_log_2() {
        let f = LogisticRegression::new(
            array![[1.0, -2.0, 0.5], [3.0, 0.0, 1.0]],
            array![1.0, 0.0, 1.0],
        )
        .unwrap();
        let phi = array![[0.0], [0.0]];
        assert!((f.evaluate(&phi) - 3.0 * 2f64.ln()).abs() < 1e-15);
        // X (1/2 - y): columns weighted by -1/2, 1/2, -1/2
        let expected = array![[-0.5 - 1.0 - 0.25], [-1.5 + 0.0 - 0.5]];
        assert!((f.gradient(&phi) - expected)
            .iter()
            .all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn scalar_instance() {
        // log(1 + e^2) - 2 and 2 (sigma(2) - 1), computed with mpmath at 30 digits
        let f = LogisticRegression::new(array![[2.0_f64]], array![1.0]).unwrap();
        let phi = array![[1.0]];
        assert!((f.evaluate(&phi) - 0.126_928_011_042_972_5).abs() < 1e-15);
        assert!((f.gradient(&phi)[[0, 0]] - -0.238_405_844_044_235_1).abs() < 1e-15);
    }

    #[test]
    fn large_margins_stay_finite() {
        let f = LogisticRegression::new(array![[1.0_f64, 1.0]], array![0.0, 1.0]).unwrap();
        for z in [-700.0, -50.0, 0.0, 50.0, 700.0] {
            let v = f.evaluate(&array![[z]]);
            assert!(v.is_finite() && v >= 0.0, "z={z}: {v}");
        }
    }

    #[test]
    fn labels_validated() {
        let err = LogisticRegression::new(array![[1.0, 1.0]], array![0.0, 2.0]).unwrap_err();
        assert!(err.message().contains("label 1"));
    }

    #[test]
    fn parts_sum_to_whole_with_penalty_off() {
        let f = LogisticRegression::new(array![[1.0, -1.0, 2.0]], array![1.0, 0.0, 0.0]).unwrap();
        let phi = array![[0.3]];
        assert_eq!(f.evaluate_batch(&phi, 0, 3), f.evaluate(&phi));
        assert_eq!(crate::infer_full_evaluate(&f, &phi), f.evaluate(&phi));
    }

    #[test]
    fn penalty_adds_l2_term() {
        let base = LogisticRegression::new(array![[1.0_f64, -1.0]], array![1.0, 0.0]).unwrap();
        let reg = base.clone().with_l2(0.5);
        let phi = array![[2.0]];
        assert!((reg.evaluate(&phi) - base.evaluate(&phi) - 2.0).abs() < 1e-12);
        assert!((reg.gradient(&phi)[[0, 0]] - base.gradient(&phi)[[0, 0]] - 2.0).abs() < 1e-12);
    }
}
