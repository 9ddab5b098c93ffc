//! Scalar abstraction for the floating-point kernels.
//!
//! The Dickmann table, the quadrature rules and the compensated accumulator
//! are written once against [`Real`] and instantiated for `f32` and `f64`.
//! Integer-driven estimators accumulate in `f64`.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable by the numerical kernels.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("f64 literal representable in target scalar")
}

/// Converts an integer into `T`.
#[inline]
pub fn from_usize<T: Real>(v: usize) -> T {
    T::from_usize(v).expect("usize representable in target scalar")
}

/// Neumaier compensated accumulator.
///
/// Merging two accumulators in a fixed order is deterministic, which is what
/// the ordered parallel reductions rely on.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Neumaier<T> {
    sum: T,
    comp: T,
}

impl<T: Real> Neumaier<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, v: T) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp = self.comp + ((self.sum - t) + v);
        } else {
            self.comp = self.comp + ((v - t) + self.sum);
        }
        self.sum = t;
    }

    /// Folds another accumulator into this one.
    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

impl<T: Real> FromIterator<T> for Neumaier<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_mass() {
        let mut naive = 0.0f64;
        let mut acc = Neumaier::new();
        for v in [1.0, 1e100, 1.0, -1e100] {
            naive += v;
            acc.add(v);
        }
        assert_eq!(naive, 0.0);
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    fn harmonic_sum_matches_f32_and_f64() {
        let a: Neumaier<f64> = (1..=100_000).map(|n| 1.0 / n as f64).collect();
        let b: Neumaier<f32> = (1..=100_000).map(|n| 1.0 / n as f32).collect();
        assert!((a.value() - b.value() as f64).abs() < 1e-4);
    }

    #[test]
    fn merge_is_order_stable() {
        let xs: Vec<f64> = (1..1000).map(|i| 1.0 / (i as f64).powi(2)).collect();
        let mut left: Neumaier<f64> = xs[..500].iter().copied().collect();
        let right: Neumaier<f64> = xs[500..].iter().copied().collect();
        left.merge(&right);
        let whole: Neumaier<f64> = xs.iter().copied().collect();
        assert!((left.value() - whole.value()).abs() < 1e-15);
    }
}
