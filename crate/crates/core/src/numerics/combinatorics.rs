use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::field::Field;
use crate::error::{Error, Result};

/// `a (a+1) ... (a+k-1)`, with `a_(0) = 1`.
pub fn rising_factorial<T: Field>(a: &T, k: u64) -> T {
    let mut acc = T::one();
    for j in 0..k {
        let f = a.clone() + T::from_int(j as i64);
        if f.is_zero() {
            return T::zero();
        }
        acc = acc * f;
    }
    acc
}

/// `a (a-1) ... (a-k+1)`, with `a_[0] = 1`.
pub fn falling_factorial<T: Field>(a: &T, k: u64) -> T {
    let mut acc = T::one();
    for j in 0..k {
        let f = a.clone() - T::from_int(j as i64);
        if f.is_zero() {
            return T::zero();
        }
        acc = acc * f;
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// Binomial coefficient with a possibly negative integer top argument.
pub fn binomial_field<T: Field>(n: i64, k: u64) -> T {
    let mut acc = T::one();
    for j in 0..k {
        acc = acc * T::from_int(n - j as i64) / T::from_int(j as i64 + 1);
    }
    acc
}

pub fn biguint_to_ratio(v: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(v.clone()))
}

/// A point of the discrete simplex: nonnegative counts with a fixed total.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Composition {
    counts: Vec<u64>,
}

impl Composition {
    pub fn new(counts: Vec<u64>) -> Self {
        Composition { counts }
    }

    /// `total * e_color`.
    pub fn corner(total: u64, dim: usize, color: usize) -> Self {
        let mut counts = vec![0; dim];
        counts[color] = total;
        Composition { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn into_counts(self) -> Vec<u64> {
        self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    /// The color holding the whole population, if there is exactly one.
    pub fn corner_color(&self) -> Option<usize> {
        let total = self.total();
        if total == 0 {
            return None;
        }
        self.counts.iter().position(|&c| c == total)
    }

    pub fn fits(&self, caps: &[u64]) -> bool {
        caps.len() == self.counts.len() && self.counts.iter().zip(caps).all(|(x, l)| x <= l)
    }
}

impl std::fmt::Display for Composition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A composition constrained entrywise by positive caps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedComposition {
    point: Composition,
    caps: Vec<u64>,
}

impl BoundedComposition {
    pub fn new(counts: Vec<u64>, caps: Vec<u64>) -> Result<Self> {
        if caps.iter().any(|&l| l == 0) {
            return Err(Error::InvalidParameter("caps must be positive".into()));
        }
        let point = Composition::new(counts);
        if !point.fits(&caps) {
            return Err(Error::Domain(format!("{point} exceeds caps {caps:?}")));
        }
        Ok(BoundedComposition { point, caps })
    }

    pub fn point(&self) -> &Composition {
        &self.point
    }

    pub fn caps(&self) -> &[u64] {
        &self.caps
    }

    pub fn total(&self) -> u64 {
        self.point.total()
    }
}

/// `|x|! / prod x_i!`
pub fn multinomial_coefficient(x: &Composition) -> BigUint {
    let mut acc = BigUint::one();
    let mut running = 0u64;
    for &c in x.counts() {
        running += c;
        acc *= binomial(running, c);
    }
    acc
}

/// Every composition of `total` into `dim` parts (optionally capped), in
/// colexicographic order: the last coordinate varies slowest.
pub fn enumerate_compositions(total: u64, dim: usize, caps: Option<&[u64]>) -> Vec<Composition> {
    let mut out = Vec::new();
    if dim == 0 {
        if total == 0 {
            out.push(Composition::new(Vec::new()));
        }
        return out;
    }
    if let Some(c) = caps {
        assert_eq!(c.len(), dim, "caps length must match dimension");
    }
    let mut buf = vec![0u64; dim];
    fill(dim - 1, total, caps, &mut buf, &mut out);
    out
}

fn fill(pos: usize, remaining: u64, caps: Option<&[u64]>, buf: &mut Vec<u64>, out: &mut Vec<Composition>) {
    let cap = caps.map_or(u64::MAX, |c| c[pos]);
    if pos == 0 {
        if remaining <= cap {
            buf[0] = remaining;
            out.push(Composition::new(buf.clone()));
        }
        return;
    }
    for v in 0..=remaining.min(cap) {
        buf[pos] = v;
        fill(pos - 1, remaining - v, caps, buf, out);
    }
    buf[pos] = 0;
}

/// `C(total + dim - 1, dim - 1)`
pub fn count_compositions(total: u64, dim: usize) -> BigUint {
    if dim == 0 {
        return if total == 0 { BigUint::one() } else { BigUint::zero() };
    }
    binomial(total + dim as u64 - 1, dim as u64 - 1)
}

/// `|X_{n, caps}^d|` by convolving the per-color generating polynomials.
pub fn count_bounded_compositions(n: u64, caps: &[u64]) -> BigUint {
    let n = n as usize;
    let mut coeffs = vec![BigUint::zero(); n + 1];
    coeffs[0] = BigUint::one();
    for &cap in caps {
        // prefix-sum convolution with 1 + t + ... + t^cap
        let mut next = vec![BigUint::zero(); n + 1];
        let mut window = BigUint::zero();
        for k in 0..=n {
            window += &coeffs[k];
            if k as u64 > cap {
                window -= &coeffs[k - cap as usize - 1];
            }
            next[k] = window.clone();
        }
        coeffs = next;
    }
    coeffs.swap_remove(n)
}

/// Parses `p/q`, integers, decimals and scientific notation into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(joined.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if neg { -value } else { value })
}

pub fn biguint_to_u64(v: &BigUint) -> Option<u64> {
    v.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(rising_factorial(&q(7, 3), 0), q(1, 1));
        assert_eq!(rising_factorial(&q(2, 1), 3), q(24, 1));
        assert_eq!(rising_factorial(&q(-3, 1), 2), q(6, 1));
        assert_eq!(falling_factorial(&q(5, 1), 2), q(20, 1));
        assert_eq!(falling_factorial(&q(3, 1), 5), q(0, 1));
        assert_eq!(falling_factorial(&q(-1, 2), 0), q(1, 1));
        // zero factor with a negative argument is an exact zero
        assert_eq!(rising_factorial(&q(-2, 1), 4), q(0, 1));
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial_coefficient(&Composition::new(vec![2, 1, 1])), BigUint::from(12u32));
        assert_eq!(multinomial_coefficient(&Composition::new(vec![0, 0, 0, 7])), BigUint::one());
        // 6-bit strings with exactly three ones
        let brute = (0u32..64).filter(|b| b.count_ones() == 3).count();
        assert_eq!(multinomial_coefficient(&Composition::new(vec![3, 3])), BigUint::from(brute));
    }

    #[test]
    fn enumeration_order_and_sizes() {
        let got: Vec<Vec<u64>> = enumerate_compositions(2, 2, None).into_iter().map(|c| c.into_counts()).collect();
        assert_eq!(got, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(enumerate_compositions(3, 3, None).len(), 10);
        assert_eq!(enumerate_compositions(2, 3, Some(&[1, 1, 1])).len(), 3);
        assert!(enumerate_compositions(4, 2, Some(&[1, 1])).is_empty());
        let all = enumerate_compositions(4, 3, None);
        let mut sorted = all.clone();
        sorted.sort_by(|a, b| a.counts().iter().rev().cmp(b.counts().iter().rev()));
        assert_eq!(all, sorted);
    }

    #[test]
    fn bounded_counts() {
        assert_eq!(count_bounded_compositions(0, &[5, 1]), BigUint::one());
        assert_eq!(count_bounded_compositions(2, &[1, 1, 1]), BigUint::from(3u32));
        let brute = enumerate_compositions(3, 3, Some(&[2, 2, 2])).len();
        assert_eq!(brute, 7);
        assert_eq!(count_bounded_compositions(3, &[2, 2, 2]), BigUint::from(7u32));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("0.2").unwrap(), q(1, 5));
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-1.25e1").unwrap(), q(-25, 2));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert_eq!(parse_rational("1e-3").unwrap(), q(1, 1000));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    proptest! {
        #[test]
        fn rising_is_signed_falling_of_negation(p in -40i64..40, d in 1i64..9, k in 0u64..=12) {
            let a = q(p, d);
            let lhs = rising_factorial(&a, k);
            let rhs = falling_factorial(&(-a.clone()), k);
            let rhs = if k % 2 == 1 { -rhs } else { rhs };
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn uncapped_bounded_count_is_binomial(n in 0u64..15, d in 1usize..6, slack in 0u64..4) {
            let caps = vec![n + slack; d];
            prop_assert_eq!(count_bounded_compositions(n, &caps), count_compositions(n, d));
        }

        #[test]
        fn bounded_count_matches_enumeration(n in 0u64..8, caps in proptest::collection::vec(1u64..5, 1..4)) {
            let listed = enumerate_compositions(n, caps.len(), Some(&caps)).len();
            prop_assert_eq!(count_bounded_compositions(n, &caps), BigUint::from(listed));
        }

        #[test]
        fn log_product_tracks_exact_product(factors in proptest::collection::vec((1i64..1000, 1i64..1000), 1..100)) {
            use crate::numerics::LogScalar;
            let mut exact = q(1, 1);
            let mut log = LogScalar::ONE;
            for (p, d) in &factors {
                exact *= q(*p, *d);
                log = log * LogScalar::from_ratio(&q(*p, *d));
            }
            let reference = Field::to_f64(&exact);
            prop_assume!(reference.is_finite() && reference.abs() > 1e-300 && reference.abs() < 1e300);
            let rel = (log.to_f64() - reference).abs() / reference.abs();
            prop_assert!(rel < 1e-12, "relative error {}", rel);
            prop_assert!(!exact.is_negative());
        }
    }
}
