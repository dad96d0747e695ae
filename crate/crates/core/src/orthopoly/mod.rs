//! Multivariate Hahn, Krawtchouk and Jacobi systems built by stick breaking,
//! plus univariate Hermite.

mod hahn;
mod hermite;
mod jacobi;
mod krawtchouk;

pub use hahn::{hahn_multi, hahn_norm2, hahn_uni, hahn_uni_norm2, negative_hahn_valid};
pub use hermite::{hermite, hermite_square_gf, hermite_square_series};
pub use jacobi::{jacobi_multi, jacobi_norm2, jacobi_uni};
pub use krawtchouk::{krawtchouk_multi, krawtchouk_norm2, krawtchouk_uni};

use crate::error::{Error, Result};
use crate::numerics::{enumerate_compositions, ExactScalar, Field};

/// Index vector `n = (n_1, ..., n_{d-1})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    n: Vec<u64>,
    degree: u64,
}

impl MultiIndex {
    pub fn new(n: Vec<u64>) -> Self {
        let degree = n.iter().sum();
        MultiIndex { n, degree }
    }

    pub fn entries(&self) -> &[u64] {
        &self.n
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// `|n^j| = n_j + ... + n_{d-1}` with 1-based `j`; zero past the end.
    pub fn tail(&self, j: usize) -> u64 {
        if j == 0 || j > self.n.len() {
            return if j == 0 { self.degree } else { 0 };
        }
        self.n[j - 1..].iter().sum()
    }
}

/// All multi-indices of total degree `degree` for a `d`-color system.
pub fn multi_indices(degree: u64, d: usize) -> Vec<MultiIndex> {
    if d <= 1 {
        return if degree == 0 { vec![MultiIndex::new(Vec::new())] } else { Vec::new() };
    }
    enumerate_compositions(degree, d - 1, None).into_iter().map(|c| MultiIndex::new(c.into_counts())).collect()
}

/// `|a^j| = a_j + ... + a_d` with 1-based `j`.
pub(crate) fn tail_sum<T: Field>(a: &[T], j: usize) -> T {
    a[j - 1..].iter().cloned().fold(T::zero(), |acc, v| acc + v)
}

/// Which orthogonal system diagonalizes a chain, with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum PolynomialFamily {
    Hahn { alpha: Vec<ExactScalar> },
    HahnNegative { caps: Vec<u64> },
    Krawtchouk { p: Vec<ExactScalar> },
    Jacobi { alpha: Vec<f64> },
    Hermite,
}

impl PolynomialFamily {
    fn discrete_params(&self) -> Result<Vec<ExactScalar>> {
        match self {
            PolynomialFamily::Hahn { alpha } => Ok(alpha.clone()),
            PolynomialFamily::HahnNegative { caps } => {
                Ok(caps.iter().map(|&l| ExactScalar::from_int(-(l as i64))).collect())
            }
            PolynomialFamily::Krawtchouk { p } => Ok(p.clone()),
            _ => Err(Error::Unsupported("continuous family has no exact discrete evaluation".into())),
        }
    }

    /// Exact value of the basis polynomial `n` at the lattice point `x`.
    pub fn eval_exact(&self, n: &MultiIndex, x: &[u64]) -> Result<ExactScalar> {
        let params = self.discrete_params()?;
        let total: u64 = x.iter().sum();
        match self {
            PolynomialFamily::Krawtchouk { .. } => krawtchouk_multi(n, x, total, &params),
            _ => hahn_multi(n, x, total, &params),
        }
    }

    /// Exact squared norm; `None` when the index is outside the system
    /// (negative-parameter indices whose norm is zero or infinite).
    pub fn norm2_exact(&self, n: &MultiIndex, total: u64) -> Option<ExactScalar> {
        let params = self.discrete_params().ok()?;
        match self {
            PolynomialFamily::Krawtchouk { .. } => Some(krawtchouk_norm2(n, total, &params)),
            PolynomialFamily::HahnNegative { .. } => hahn_norm2(n, total, &params),
            _ => hahn_norm2(n, total, &params),
        }
    }

    /// Every basis index of degree `degree` for `N = total`.
    pub fn indices(&self, degree: u64, d: usize, total: u64) -> Vec<MultiIndex> {
        let all = multi_indices(degree, d);
        match self {
            PolynomialFamily::HahnNegative { caps } => {
                all.into_iter().filter(|n| negative_hahn_valid(n, total, caps)).collect()
            }
            _ => all,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tails() {
        let n = MultiIndex::new(vec![1, 2, 3]);
        assert_eq!(n.degree(), 6);
        assert_eq!(n.tail(1), 6);
        assert_eq!(n.tail(2), 5);
        assert_eq!(n.tail(3), 3);
        assert_eq!(n.tail(4), 0);
        assert_eq!(multi_indices(2, 3).len(), 3);
        assert_eq!(multi_indices(0, 1).len(), 1);
    }
}
