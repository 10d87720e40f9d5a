#![allow(dead_code)]

use std::cell::Cell;

use ndarray::{Array1, Array2};
use optkit::{Differentiable, Element, Function};

/// `sum_j (x_j - c_j)^2` for a constant center `c`.
pub struct Quadratic {
    pub center: Vec<f64>,
}

impl Quadratic {
    pub fn origin(dim: usize) -> Self {
        Self {
            center: vec![0.0; dim],
        }
    }
}

impl<T: Element> Function<T> for Quadratic {
    fn evaluate(&self, x: &Array2<T>) -> T {
        x.iter().zip(&self.center).fold(T::zero(), |acc, (&v, &c)| {
            let r = v - T::of(c);
            acc + r * r
        })
    }
}

impl<T: Element> Differentiable<T> for Quadratic {
    fn gradient(&self, x: &Array2<T>) -> Array2<T> {
        let mut g = x.clone();
        for (gj, &c) in g.iter_mut().zip(&self.center) {
            *gj = T::of(2.0) * (*gj - T::of(c));
        }
        g
    }
}

/// Counts every call made to the wrapped objective.
pub struct Counting<F> {
    pub inner: F,
    pub evaluations: Cell<usize>,
    pub gradients: Cell<usize>,
}

impl<F> Counting<F> {
    pub fn new(inner: F) -> Self {
        Self {
            inner,
            evaluations: Cell::new(0),
            gradients: Cell::new(0),
        }
    }

    pub fn total(&self) -> usize {
        self.evaluations.get() + self.gradients.get()
    }
}

impl<T: Element, F: Function<T>> Function<T> for Counting<F> {
    fn evaluate(&self, x: &Array2<T>) -> T {
        self.evaluations.set(self.evaluations.get() + 1);
        self.inner.evaluate(x)
    }
}

impl<T: Element, F: Differentiable<T>> Differentiable<T> for Counting<F> {
    fn gradient(&self, x: &Array2<T>) -> Array2<T> {
        self.gradients.set(self.gradients.get() + 1);
        self.inner.gradient(x)
    }
}

/// Solves `X X' phi = X y` in double precision by Gaussian elimination with
/// partial pivoting.
pub fn normal_equations(predictors: &Array2<f64>, responses: &Array1<f64>) -> Vec<f64> {
    let (d, n) = predictors.dim();
    let mut a = vec![vec![0.0; d + 1]; d];
    for r in 0..d {
        for c in 0..d {
            a[r][c] = (0..n)
                .map(|i| predictors[[r, i]] * predictors[[c, i]])
                .sum();
        }
        a[r][d] = (0..n).map(|i| predictors[[r, i]] * responses[i]).sum();
    }
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        let pivot_row = a[col].clone();
        for row in a.iter_mut().skip(col + 1) {
            let factor = row[col] / pivot_row[col];
            for (v, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *v -= factor * p;
            }
        }
    }
    let mut phi = vec![0.0; d];
    for r in (0..d).rev() {
        let tail: f64 = (r + 1..d).map(|c| a[r][c] * phi[c]).sum();
        phi[r] = (a[r][d] - tail) / a[r][r];
    }
    phi
}

pub fn column(values: &[f64]) -> Array2<f64> {
    Array2::from_shape_vec((values.len(), 1), values.to_vec()).unwrap()
}
