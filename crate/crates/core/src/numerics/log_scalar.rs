use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::field::{ln_abs_bigint, ratio_to_f64};

/// Signed real stored as `sign * exp(hi + lo)`.
///
/// The log magnitude is kept as an unevaluated double-double sum so that
/// products of many factors and round trips keep full double precision even
/// when `|hi|` is in the hundreds. Zero is `sign == 0` with `hi == -inf`.
#[derive(Clone, Copy, PartialEq)]
pub struct LogScalar {
    sign: i8,
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar { sign: 0, hi: f64::NEG_INFINITY, lo: 0.0 };
    pub const ONE: LogScalar = LogScalar { sign: 1, hi: 0.0, lo: 0.0 };

    pub fn new(sign: i8, ln_mag: f64) -> Self {
        if sign == 0 || ln_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogScalar { sign: sign.signum(), hi: ln_mag, lo: 0.0 }
        }
    }

    fn from_parts(sign: i8, a: f64, b: f64) -> Self {
        if sign == 0 || a == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        if !a.is_finite() {
            return LogScalar { sign, hi: a, lo: 0.0 };
        }
        let (hi, lo) = two_sum(a, b);
        LogScalar { sign, hi, lo }
    }

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            return Self::ZERO;
        }
        let sign = if v > 0.0 { 1 } else { -1 };
        let a = v.abs();
        let hi = a.ln();
        let e = hi.exp();
        let lo = if e.is_normal() && a.is_normal() { ((a - e) / e).ln_1p() } else { 0.0 };
        LogScalar { sign, hi, lo }
    }

    pub fn from_ratio(r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::ZERO;
        }
        let sign = if r.is_negative() { -1 } else { 1 };
        let v = ratio_to_f64(r);
        if v.is_finite() && v.abs() >= f64::MIN_POSITIVE {
            return Self::from_f64(v);
        }
        LogScalar { sign, hi: ln_abs_bigint(r.numer()) - ln_abs_bigint(r.denom()), lo: 0.0 }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn ln_abs(&self) -> f64 {
        self.hi + self.lo
    }

    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => {
                let e = self.hi.exp();
                let m = if self.lo == 0.0 { e } else { e.mul_add(self.lo.exp_m1(), e) };
                s as f64 * m
            }
        }
    }

    pub fn abs(&self) -> Self {
        LogScalar { sign: self.sign.abs(), ..*self }
    }

    pub fn powu(&self, k: u64) -> Self {
        if k == 0 {
            return Self::ONE;
        }
        if self.sign == 0 {
            return Self::ZERO;
        }
        let sign = if self.sign < 0 && k % 2 == 1 { -1 } else { 1 };
        let kf = k as f64;
        let p = self.hi * kf;
        let err = self.hi.mul_add(kf, -p);
        Self::from_parts(sign, p, err + self.lo * kf)
    }

    /// Real power of the magnitude; the sign must be nonnegative.
    pub fn powf(&self, t: f64) -> Self {
        if self.sign == 0 {
            return if t == 0.0 { Self::ONE } else { Self::ZERO };
        }
        let p = self.hi * t;
        let err = self.hi.mul_add(t, -p);
        Self::from_parts(1, p, err + self.lo * t)
    }
}

impl fmt::Debug for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "LogScalar(0)"),
            s => write!(f, "LogScalar({}exp({}))", if s < 0 { "-" } else { "" }, self.ln_abs()),
        }
    }
}

impl Mul for LogScalar {
    type Output = LogScalar;
    fn mul(self, rhs: LogScalar) -> LogScalar {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        let (s, e) = two_sum(self.hi, rhs.hi);
        Self::from_parts(self.sign * rhs.sign, s, e + self.lo + rhs.lo)
    }
}

impl Div for LogScalar {
    type Output = LogScalar;
    fn div(self, rhs: LogScalar) -> LogScalar {
        if self.sign == 0 {
            return Self::ZERO;
        }
        if rhs.sign == 0 {
            return LogScalar { sign: self.sign, hi: f64::INFINITY, lo: 0.0 };
        }
        let (s, e) = two_sum(self.hi, -rhs.hi);
        Self::from_parts(self.sign * rhs.sign, s, e + self.lo - rhs.lo)
    }
}

impl Neg for LogScalar {
    type Output = LogScalar;
    fn neg(self) -> LogScalar {
        LogScalar { sign: -self.sign, ..self }
    }
}

impl Add for LogScalar {
    type Output = LogScalar;
    fn add(self, rhs: LogScalar) -> LogScalar {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.ln_abs() >= rhs.ln_abs() { (self, rhs) } else { (rhs, self) };
        let delta = (small.hi - big.hi) + (small.lo - big.lo);
        if big.sign == small.sign {
            Self::from_parts(big.sign, big.hi, big.lo + delta.exp().ln_1p())
        } else {
            if delta == 0.0 {
                return Self::ZERO;
            }
            Self::from_parts(big.sign, big.hi, big.lo + (-delta.exp()).ln_1p())
        }
    }
}

impl Sub for LogScalar {
    type Output = LogScalar;
    fn sub(self, rhs: LogScalar) -> LogScalar {
        self + (-rhs)
    }
}
