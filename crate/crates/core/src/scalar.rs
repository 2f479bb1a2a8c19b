//! Scalar abstractions.
//!
//! Combinatorial kernels (hafnian, permanent, monomial pairings) only need
//! ring arithmetic and work over integers as well as floats. Everything that
//! takes square roots, logarithms or samples random numbers needs [`Real`].

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Ring-like scalar used by the exact combinatorial kernels.
///
/// Implemented for `f32`, `f64`, `i64` and `i128`. Float implementations
/// accumulate with Neumaier compensation; integer ones are exact already.
pub trait Field: Num + Copy + PartialOrd + FromPrimitive + Send + Sync + Debug + 'static {
    /// Adds `x` into the running pair `(sum, carry)`.
    #[inline]
    fn accumulate(sum: &mut Self, carry: &mut Self, x: Self) {
        let _ = carry;
        *sum = *sum + x;
    }
}

macro_rules! exact_field {
    ($($t:ty),*) => { $( impl Field for $t {} )* };
}
exact_field!(i64, i128);

macro_rules! float_field {
    ($($t:ty),*) => {
        $(
            impl Field for $t {
                #[inline]
                fn accumulate(sum: &mut Self, carry: &mut Self, x: Self) {
                    let t = *sum + x;
                    if sum.abs() >= x.abs() {
                        *carry += (*sum - t) + x;
                    } else {
                        *carry += (x - t) + *sum;
                    }
                    *sum = t;
                }
            }
        )*
    };
}
float_field!(f32, f64);

/// Real floating-point scalar (`f32` or `f64`).
pub trait Real: Field + Float + ToPrimitive + Display + Default {
    /// Lossy conversion from `f64`; exact for `f64` itself.
    #[inline]
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 converts to any float")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Compensated running sum.
#[derive(Clone, Copy, Debug)]
pub struct Accumulator<T: Field> {
    sum: T,
    carry: T,
}

impl<T: Field> Default for Accumulator<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Field> Accumulator<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), carry: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        T::accumulate(&mut self.sum, &mut self.carry, x);
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

impl<T: Field> FromIterator<T> for Accumulator<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn sum<T: Field>(iter: impl IntoIterator<Item = T>) -> T {
    iter.into_iter().collect::<Accumulator<T>>().value()
}

#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub(crate) fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let xs = [1.0e16_f64, 1.0, -1.0e16, 1.0];
        assert_eq!(sum(xs), 2.0);
        assert_ne!(xs.iter().sum::<f64>(), 2.0);
    }

    #[test]
    fn integer_sum_is_plain() {
        assert_eq!(sum([3_i64, -5, 9]), 7);
    }
}
