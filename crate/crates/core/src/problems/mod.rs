//! Objective functions for examples, tests and benchmarks.

mod data;
mod linear;
mod logistic;
mod rosenbrock;

pub use data::{
    generate_noisy_binary, generate_noisy_linear, load_csv, parse_csv, parse_number, Dataset,
    DatasetError, NoisyLinearData,
};
pub use linear::{LinearRegression, SeparableLinearRegression};
pub use logistic::{sigmoid, softplus, LogisticRegression};
pub use rosenbrock::Rosenbrock;

use ndarray::Array2;

use crate::capabilities::Diagnostic;
use crate::element::Element;

/// Converts `d x n` predictors into contiguous `n x d` sample rows.
fn samples_from_predictors<T: Element>(
    objective: &str,
    predictors: Array2<T>,
    n: usize,
) -> Result<Array2<T>, Diagnostic> {
    let (d, cols) = predictors.dim();
    if d == 0 || cols == 0 || cols != n {
        return Err(Diagnostic::new(
            format!(
                "{objective} evaluate needs a d x n predictor matrix with d, n >= 1 and one \
                 response per column; got {d} x {cols} predictors and {n} responses"
            ),
            Vec::new(),
        ));
    }
    Ok(predictors.reversed_axes().as_standard_layout().into_owned())
}

fn check_column_point<T: Element>(
    objective: &str,
    phi: &Array2<T>,
    d: usize,
) -> Result<(), Diagnostic> {
    if phi.dim() == (d, 1) {
        Ok(())
    } else {
        Err(Diagnostic::shape_mismatch(
            objective,
            "evaluate takes a d x 1 parameter column",
            (d, 1),
            phi.dim(),
        ))
    }
}
