//! Finite-difference gradient checking.

use ndarray::Array2;

use crate::element::{inf_norm, Element};
use crate::objective::Function;

/// Central differences `(f(x + h e_j) - f(x - h e_j)) / 2h` for every
/// coordinate of `x`. The result has the shape of `x`.
///
/// ```
/// use ndarray::array;
/// use optkit::{finite_difference_gradient, DynObjective};
///
/// let f = DynObjective::<f64>::new().with_evaluate(|x| x.iter().map(|v| v * v).sum());
/// let g = finite_difference_gradient(&f, &array![[1.0], [2.0]], 1e-5);
/// assert!((g[[0, 0]] - 2.0).abs() < 1e-8 && (g[[1, 0]] - 4.0).abs() < 1e-8);
/// ```
///
/// # Panics
/// If `h` is not positive.
pub fn finite_difference_gradient<T: Element, F: Function<T> + ?Sized>(
    f: &F,
    x: &Array2<T>,
    h: T,
) -> Array2<T> {
    assert!(h > T::zero(), "finite difference step must be positive");
    let mut probe = x.clone();
    let mut g = Array2::zeros(x.dim());
    let two_h = h + h;
    for (idx, &xj) in x.indexed_iter() {
        probe[idx] = xj + h;
        let plus = f.evaluate(&probe);
        probe[idx] = xj - h;
        let minus = f.evaluate(&probe);
        probe[idx] = xj;
        g[idx] = (plus - minus) / two_h;
    }
    g
}

/// Step `1e-6 (1 + |x|_inf)` used by the gradient checks.
pub fn default_step<T: Element>(x: &Array2<T>) -> T {
    T::of(1e-6) * (T::one() + inf_norm(x))
}

/// Largest per-coordinate `|a_j - n_j| / (1 + |a_j|)`.
pub fn max_relative_error<T: Element>(analytic: &Array2<T>, numeric: &Array2<T>) -> f64 {
    assert_eq!(analytic.dim(), numeric.dim(), "gradient shapes differ");
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| ((a - n).abs() / (T::one() + a.abs())).as_f64())
        .fold(0.0, f64::max)
}
