//! Scalar abstractions.
//!
//! Classical message passing is written against [`Probability`], which is
//! implemented for `f32`, `f64` and exact [`BigRational`]. Quantum simulation
//! is written against [`Real`], the floating-point subset.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive, Zero};

/// A number usable as a probability in the message algebra.
pub trait Probability: Clone + PartialOrd + Debug + Num + Send + Sync + 'static {
    /// Exact `num / den` where the type allows it.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Nearest representable value (exact binary expansion for rationals).
    fn from_f64(value: f64) -> Self;

    fn to_f64(&self) -> f64;

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    /// Keeps soft values away from the representable floor. Identity for exact types.
    fn guard(self) -> Self {
        self
    }

    fn powu(&self, exp: usize) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

/// Lower clamp applied by [`Probability::guard`] on `f64`.
pub const F64_GUARD: f64 = 1e-300;

impl Probability for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_f64(value: f64) -> Self {
        value
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn guard(self) -> Self {
        self.clamp(F64_GUARD, 1.0 - F64_GUARD)
    }
    fn powu(&self, exp: usize) -> Self {
        self.powi(exp as i32)
    }
}

impl Probability for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }
    fn from_f64(value: f64) -> Self {
        value as f32
    }
    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
    fn guard(self) -> Self {
        self.clamp(f32::MIN_POSITIVE, 1.0 - f32::EPSILON / 2.0)
    }
    fn powu(&self, exp: usize) -> Self {
        self.powi(exp as i32)
    }
}

impl Probability for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_f64(value: f64) -> Self {
        BigRational::from_float(value).unwrap_or_else(BigRational::zero)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Floating-point scalar used by the dense quantum simulator.
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + Sum + 'static {
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable")
    }
}

impl<T> Real for T where T: Float + FromPrimitive + Debug + Display + Send + Sync + Sum + 'static {}

/// Binary entropy in bits. `h(0) = h(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Inverse of [`binary_entropy`] on `[0, 1/2]` by bisection.
pub fn inverse_binary_entropy(h: f64) -> f64 {
    if h <= 0.0 {
        return 0.0;
    }
    if h >= 1.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Probability of one specific pattern of the given weight under i.i.d. Bernoulli(p).
pub fn pattern_probability<P: Probability>(p: &P, weight: usize, len: usize) -> P {
    p.powu(weight) * (P::one() - p.clone()).powu(len - weight)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_endpoints_and_symmetry() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.11) - binary_entropy(0.89)).abs() < 1e-15);
        assert!((inverse_binary_entropy(binary_entropy(0.01)) - 0.01).abs() < 1e-12);
    }

    #[test]
    fn rational_half_and_pow_are_exact() {
        let p = BigRational::from_ratio(1, 10);
        assert_eq!(BigRational::half(), BigRational::from_ratio(1, 2));
        assert_eq!(p.powu(3), BigRational::from_ratio(1, 1000));
        assert_eq!(pattern_probability(&p, 1, 3), BigRational::from_ratio(81, 1000));
    }

    #[test]
    fn float_guard_clamps_floor() {
        assert_eq!(0.0_f64.guard(), F64_GUARD);
        assert_eq!(0.3_f64.guard(), 0.3);
    }
}
