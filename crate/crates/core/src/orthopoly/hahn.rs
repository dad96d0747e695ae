use super::{tail_sum, MultiIndex};
use crate::error::{Error, Result};
use crate::numerics::{binomial_field, falling_factorial, int, rising_factorial, Field};

/// Univariate Hahn `Q_n(x; N, a, b)` as a terminating 3F2 at 1.
pub fn hahn_uni<T: Field>(n: u64, x: u64, total: u64, a: &T, b: &T) -> Result<T> {
    if n > total || x > total {
        return Err(Error::Domain(format!("need n, x <= N (n={n}, x={x}, N={total})")));
    }
    let c = int::<T>(n as i64 - 1) + a.clone() + b.clone();
    let mut term = T::one();
    let mut acc = T::one();
    for j in 0..n.min(x) {
        let jf = j as i64;
        let num = int::<T>(jf - n as i64) * (c.clone() + int(jf)) * int(jf - x as i64);
        if num.is_zero() {
            break;
        }
        let den = (a.clone() + int(jf)) * int(jf - total as i64) * int(jf + 1);
        if den.is_zero() {
            return Err(Error::Pole(format!("(a)_(j) vanishes at j={} before the series terminates", j + 1)));
        }
        term = term * num / den;
        acc = acc + term.clone();
    }
    Ok(acc)
}

/// Right side of the univariate orthogonality relation under `DM(.|N, a, b)`.
pub fn hahn_uni_norm2<T: Field>(n: u64, total: u64, a: &T, b: &T) -> T {
    if n == 0 {
        return T::one();
    }
    let s = a.clone() + b.clone();
    let num = rising_factorial(&(s.clone() + int(total as i64)), n) * rising_factorial(b, n);
    let den = binomial_field::<T>(total as i64, n)
        * (s.clone() + int(2 * n as i64 - 1))
        * rising_factorial(&s, n - 1)
        * rising_factorial(a, n);
    num / den
}

/// `(-N')_(n) Q_n(x; N', a, b)` written without the `(-N')_(k)` divisions, so
/// it stays finite for any integer `N'`.
fn homogenized_factor<T: Field>(nj: u64, xj: u64, nprime: i64, a: &T, b: &T) -> Result<T> {
    let c = int::<T>(nj as i64 - 1) + a.clone() + b.clone();
    let mut coef = T::one();
    let mut acc = rising_factorial(&int::<T>(-nprime), nj);
    for k in 0..nj.min(xj) {
        let kf = k as i64;
        let num = int::<T>(kf - nj as i64) * (c.clone() + int(kf)) * int(kf - xj as i64);
        if num.is_zero() {
            break;
        }
        let den = (a.clone() + int(kf)) * int(kf + 1);
        if den.is_zero() {
            return Err(Error::Pole(format!("(alpha_j)_(k) vanishes at k={}", k + 1)));
        }
        coef = coef * num / den;
        acc = acc + coef.clone() * rising_factorial(&int::<T>(kf + 1 - nprime), nj - k - 1);
    }
    Ok(acc)
}

/// Multivariate Hahn polynomial on compositions of `N` with parameters `alpha`.
/// Negative integer parameters give the system for the hypergeometric law.
pub fn hahn_multi<T: Field>(n: &MultiIndex, x: &[u64], total: u64, alpha: &[T]) -> Result<T> {
    let d = alpha.len();
    if x.len() != d || n.entries().len() + 1 != d {
        return Err(Error::InvalidParameter("index, state and parameter dimensions disagree".into()));
    }
    if x.iter().sum::<u64>() != total {
        return Err(Error::Domain("state total differs from N".into()));
    }
    if n.degree() > total {
        return Err(Error::Domain(format!("degree {} exceeds N = {total}", n.degree())));
    }
    let mut acc = falling_factorial(&int::<T>(total as i64), n.degree());
    acc = if n.degree() % 2 == 1 { -(T::one() / acc) } else { T::one() / acc };
    let mut x_head = 0u64;
    for j in 1..d {
        let nj = n.entries()[j - 1];
        let n_tail = n.tail(j + 1);
        let nprime = total as i64 - x_head as i64 - n_tail as i64;
        let a = alpha[j - 1].clone();
        let b = tail_sum(alpha, j + 1) + int(2 * n_tail as i64);
        let f = homogenized_factor(nj, x[j - 1], nprime, &a, &b)?;
        if f.is_zero() {
            return Ok(T::zero());
        }
        acc = acc * f;
        x_head += x[j - 1];
    }
    Ok(acc)
}

fn norm2_parts<T: Field>(n: &MultiIndex, total: u64, alpha: &[T]) -> (T, T) {
    let d = alpha.len();
    let deg = n.degree();
    let abs_alpha = tail_sum(alpha, 1);
    let mut num = rising_factorial(&(abs_alpha.clone() + int(total as i64)), deg);
    let mut den = falling_factorial(&int::<T>(total as i64), deg) * rising_factorial(&abs_alpha, 2 * deg);
    for j in 1..d {
        let nj = n.entries()[j - 1];
        let tail_j = n.tail(j) as i64;
        let tail_next = n.tail(j + 1) as i64;
        num = num
            * rising_factorial(&(tail_sum(alpha, j) + int(tail_j + tail_next - 1)), nj)
            * rising_factorial(&(tail_sum(alpha, j + 1) + int(2 * tail_next)), nj)
            * falling_factorial(&int::<T>(nj as i64), nj);
        den = den * rising_factorial(&alpha[j - 1], nj);
    }
    (num, den)
}

/// Squared norm `d_n^2`; `None` if it is zero or infinite, which happens
/// only for negative parameters at indices outside the hypergeometric system.
pub fn hahn_norm2<T: Field>(n: &MultiIndex, total: u64, alpha: &[T]) -> Option<T> {
    let (num, den) = norm2_parts(n, total, alpha);
    if num.is_zero() || den.is_zero() {
        None
    } else {
        Some(num / den)
    }
}

/// Whether `n` indexes a member of the negative-parameter system for caps `l`.
pub fn negative_hahn_valid(n: &MultiIndex, total: u64, caps: &[u64]) -> bool {
    let alpha: Vec<crate::numerics::ExactScalar> = caps.iter().map(|&l| int(-(l as i64))).collect();
    hahn_norm2(n, total, &alpha).is_some()
}
