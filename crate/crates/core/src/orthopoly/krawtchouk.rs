use super::{tail_sum, MultiIndex};
use crate::error::{Error, Result};
use crate::numerics::{falling_factorial, int, rising_factorial, Field};

/// Univariate Krawtchouk `K_n(x; M, q)` as a terminating 2F1 at `1/q`.
pub fn krawtchouk_uni<T: Field>(n: u64, x: u64, m: u64, q: &T) -> Result<T> {
    if n > m || x > m {
        return Err(Error::Domain(format!("need n, x <= M (n={n}, x={x}, M={m})")));
    }
    let mut term = T::one();
    let mut acc = T::one();
    for j in 0..n.min(x) {
        let jf = j as i64;
        let num = int::<T>(jf - n as i64) * int(jf - x as i64);
        let den = int::<T>(jf - m as i64) * int(jf + 1) * q.clone();
        term = term * num / den;
        acc = acc + term.clone();
    }
    Ok(acc)
}

fn homogenized_factor<T: Field>(nj: u64, xj: u64, nprime: i64, q: &T) -> T {
    let mut coef = T::one();
    let mut acc = rising_factorial(&int::<T>(-nprime), nj);
    for k in 0..nj.min(xj) {
        let kf = k as i64;
        coef = coef * int::<T>(kf - nj as i64) * int(kf - xj as i64) / (int::<T>(kf + 1) * q.clone());
        acc = acc + coef.clone() * rising_factorial(&int::<T>(kf + 1 - nprime), nj - k - 1);
    }
    acc
}

/// Multivariate Krawtchouk polynomial for the multinomial law with cell
/// probabilities `p` (all positive).
pub fn krawtchouk_multi<T: Field>(n: &MultiIndex, x: &[u64], total: u64, p: &[T]) -> Result<T> {
    let d = p.len();
    if x.len() != d || n.entries().len() + 1 != d {
        return Err(Error::InvalidParameter("index, state and parameter dimensions disagree".into()));
    }
    if x.iter().sum::<u64>() != total || n.degree() > total {
        return Err(Error::Domain("state total differs from N or degree exceeds N".into()));
    }
    if p.iter().any(|v| v.is_zero()) {
        return Err(Error::InvalidParameter("cell probabilities must be positive".into()));
    }
    let lead = falling_factorial(&int::<T>(total as i64), n.degree());
    let mut acc = if n.degree() % 2 == 1 { -(T::one() / lead) } else { T::one() / lead };
    let mut x_head = 0u64;
    for j in 1..d {
        let nj = n.entries()[j - 1];
        let nprime = total as i64 - x_head as i64 - n.tail(j + 1) as i64;
        let q = p[j - 1].clone() / tail_sum(p, j);
        acc = acc * homogenized_factor(nj, x[j - 1], nprime, &q);
        x_head += x[j - 1];
    }
    Ok(acc)
}

pub fn krawtchouk_norm2<T: Field>(n: &MultiIndex, total: u64, p: &[T]) -> T {
    let mut acc = T::one() / falling_factorial(&int::<T>(total as i64), n.degree());
    for j in 1..p.len() {
        let nj = n.entries()[j - 1];
        let r = tail_sum(p, j) * tail_sum(p, j + 1) / p[j - 1].clone();
        acc = acc * r.powu(nj) * falling_factorial(&int::<T>(nj as i64), nj);
    }
    acc
}
