use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::LogScalar;

/// Exact rational scalar. Always reduced with a positive denominator.
pub type ExactScalar = BigRational;

/// Arithmetic shared by the exact, double and log-domain evaluators.
///
/// Every closed form in the crate is written once against this trait and
/// instantiated with [`ExactScalar`] for oracles, `f64` for continuous
/// families and [`LogScalar`] for large populations.
pub trait Field:
    Clone
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn from_ratio(r: &BigRational) -> Self;
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;

    fn powu(&self, k: u64) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }
    fn powu(&self, k: u64) -> Self {
        num_traits::pow(self.clone(), k as usize)
    }
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(r: &BigRational) -> Self {
        ratio_to_f64(r)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn powu(&self, k: u64) -> Self {
        if k <= i32::MAX as u64 {
            self.powi(k as i32)
        } else {
            self.powf(k as f64)
        }
    }
}

impl Field for LogScalar {
    fn zero() -> Self {
        LogScalar::ZERO
    }
    fn one() -> Self {
        LogScalar::ONE
    }
    fn from_int(v: i64) -> Self {
        LogScalar::from_f64(v as f64)
    }
    fn from_ratio(r: &BigRational) -> Self {
        LogScalar::from_ratio(r)
    }
    fn is_zero(&self) -> bool {
        self.sign() == 0
    }
    fn to_f64(&self) -> f64 {
        LogScalar::to_f64(self)
    }
    fn powu(&self, k: u64) -> Self {
        LogScalar::powu(self, k)
    }
}

/// Converts a rational to the nearest double, staying accurate when the
/// numerator and denominator individually overflow `f64`.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        if v.is_finite() && (v != 0.0 || Zero::is_zero(r)) {
            return v;
        }
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let ln = ln_abs_bigint(r.numer()) - ln_abs_bigint(r.denom());
    sign * ln.exp()
}

/// Natural log of |v| for arbitrarily large integers.
pub fn ln_abs_bigint(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = v.abs() >> shift;
    top.to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn int<T: Field>(v: i64) -> T {
    T::from_int(v)
}

/// `num / den` where a vanishing numerator wins over a vanishing denominator.
///
/// Returns `None` when only the denominator vanishes.
pub fn cancel_div<T: Field>(num: T, den: T) -> Option<T> {
    if num.is_zero() {
        Some(T::zero())
    } else if den.is_zero() {
        None
    } else {
        Some(num / den)
    }
}
