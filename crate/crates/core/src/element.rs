//! Floating-point element types usable as optimization parameters.

use std::fmt::{Debug, Display, LowerExp};

use ndarray::{Array2, LinalgScalar, ScalarOperand};
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

mod sealed {
    pub trait Sealed {}
    impl Sealed for f32 {}
    impl Sealed for f64 {}
}

/// Element type of a parameter matrix: `f32` or `f64`.
///
/// The trait is sealed; a single optimization run uses one precision throughout.
pub trait Element:
    Float
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + LinalgScalar
    + ScalarOperand
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
    + sealed::Sealed
{
    /// Human-readable precision name.
    const PRECISION: &'static str;

    /// Converts an `f64` constant into this precision (rounding for `f32`).
    fn of(v: f64) -> Self;

    fn as_f64(self) -> f64;
}

impl Element for f32 {
    const PRECISION: &'static str = "single";

    #[inline]
    fn of(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Element for f64 {
    const PRECISION: &'static str = "double";

    #[inline]
    fn of(v: f64) -> Self {
        v
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

/// Dense 2-D parameter matrix; column vectors are `d x 1`.
pub type ParameterMatrix<T> = Array2<T>;

/// Sequential dot product over the logical (row-major) element order.
pub fn dot<T: Element>(a: &Array2<T>, b: &Array2<T>) -> T {
    debug_assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Largest absolute element; zero for an empty matrix.
pub fn inf_norm<T: Element>(a: &Array2<T>) -> T {
    a.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
}

pub fn l2_norm<T: Element>(a: &Array2<T>) -> T {
    dot(a, a).sqrt()
}

pub fn all_finite<T: Element>(a: &Array2<T>) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Divides every element by `count`.
///
/// Both the mini-batch optimizers and the averaged-parts adapter go through
/// this helper so their arithmetic is identical.
pub fn average_in_place<T: Element>(sum: &mut Array2<T>, count: usize) {
    let n = T::of(count as f64);
    sum.mapv_inplace(|v| v / n);
}

/// Relative change between two successive objective values.
///
/// The denominator is floored at one so values near zero compare absolutely.
pub fn relative_change<T: Element>(previous: T, current: T) -> T {
    let scale = previous.abs().max(current.abs()).max(T::one());
    (previous - current).abs() / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn norms() {
        let a = array![[3.0_f64], [-4.0]];
        assert_eq!(inf_norm(&a), 4.0);
        assert_eq!(l2_norm(&a), 5.0);
        assert_eq!(dot(&a, &a), 25.0);
    }

    #[test]
    fn relative_change_floors_denominator() {
        assert_eq!(relative_change(1e-3_f64, 0.0), 1e-3);
        assert_eq!(relative_change(100.0_f64, 50.0), 0.5);
    }

    #[test]
    fn finite_check() {
        assert!(all_finite(&array![[1.0_f32, 2.0]]));
        assert!(!all_finite(&array![[1.0_f32, f32::NAN]]));
        assert!(!all_finite(&array![[f64::INFINITY]]));
    }
}
