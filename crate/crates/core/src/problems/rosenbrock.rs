use ndarray::{array, Array2};

use crate::capabilities::Diagnostic;
use crate::element::Element;
use crate::objective::{Differentiable, Function};

/// `f(a, b) = (1 - a)^2 + 100 (b - a^2)^2`, minimized at `(1, 1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rosenbrock;

fn coords<T: Element>(x: &Array2<T>) -> (T, T) {
    let mut it = x.iter();
    (*it.next().unwrap(), *it.next().unwrap())
}

impl<T: Element> Function<T> for Rosenbrock {
    fn evaluate(&self, x: &Array2<T>) -> T {
        let (a, b) = coords(x);
        let u = T::one() - a;
        let v = b - a * a;
        u * u + T::of(100.0) * v * v
    }

    fn check_point(&self, x: &Array2<T>) -> Result<(), Diagnostic> {
        if x.len() == 2 {
            Ok(())
        } else {
            Err(Diagnostic::shape_mismatch(
                "Rosenbrock",
                "evaluate takes a two-element point",
                (2, 1),
                x.dim(),
            ))
        }
    }
}

impl<T: Element> Differentiable<T> for Rosenbrock {
    fn gradient(&self, x: &Array2<T>) -> Array2<T> {
        let (a, b) = coords(x);
        let v = b - a * a;
        let da = T::of(-2.0) * (T::one() - a) - T::of(400.0) * a * v;
        let db = T::of(200.0) * v;
        let mut g = array![[da], [db]];
        if x.dim() != (2, 1) {
            g = g.into_shape_with_order(x.dim()).expect("two-element point");
        }
        g
    }
}
