//! Test-only oracles. Nothing here calls the spectral or kernel code paths
//! under test; chains enter only through their transition rows.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use polymix::chains::{transition_row, ChainSpec};

pub type Q = BigRational;

pub fn q(s: &str) -> Q {
    polymix::numerics::parse_rational(s).unwrap()
}

pub fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn to_f64(r: &Q) -> f64 {
    r.to_f64().unwrap()
}

pub fn rising(a: &Q, k: u64) -> Q {
    (0..k).fold(Q::one(), |acc, j| acc * (a + qi(j as i64)))
}

pub fn choose(n: u64, k: u64) -> Q {
    if k > n {
        return Q::zero();
    }
    (0..k).fold(Q::one(), |acc, j| acc * qi((n - j) as i64) / qi((j + 1) as i64))
}

fn factorial(n: u64) -> Q {
    (1..=n).fold(Q::one(), |acc, j| acc * qi(j as i64))
}

/// Every `x` with `sum x = total`, `x_i <= caps_i`.
pub fn compositions(total: u64, d: usize, caps: Option<&[u64]>) -> Vec<Vec<u64>> {
    fn go(rest: u64, i: usize, d: usize, caps: Option<&[u64]>, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == d - 1 {
            if caps.is_none_or(|c| rest <= c[i]) {
                cur.push(rest);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        let hi = caps.map_or(rest, |c| rest.min(c[i]));
        for v in 0..=hi {
            cur.push(v);
            go(rest - v, i + 1, d, caps, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(total, 0, d, caps, &mut Vec::new(), &mut out);
    out
}

pub fn dm_pmf(x: &[u64], alpha: &[Q]) -> Q {
    let n: u64 = x.iter().sum();
    let total: Q = alpha.iter().sum();
    let mut v = factorial(n) / rising(&total, n);
    for (xi, a) in x.iter().zip(alpha) {
        v = v * rising(a, *xi) / factorial(*xi);
    }
    v
}

pub fn hypergeometric_pmf(x: &[u64], caps: &[u64]) -> Q {
    let n: u64 = x.iter().sum();
    let big: u64 = caps.iter().sum();
    x.iter().zip(caps).fold(Q::one(), |acc, (xi, l)| acc * choose(*l, *xi)) / choose(big, n)
}

pub fn multinomial_pmf(x: &[u64], p: &[Q]) -> Q {
    let n: u64 = x.iter().sum();
    x.iter().zip(p).fold(factorial(n), |acc, (xi, pi)| acc * num_traits::pow(pi.clone(), *xi as usize) / factorial(*xi))
}

/// `alpha_i = k m p_i / (1 - m)`
pub fn mutation_alpha(k: u64, m: &Q, p: &[Q]) -> Vec<Q> {
    p.iter().map(|pi| qi(k as i64) * m * pi / (Q::one() - m)).collect()
}

pub fn stationary(spec: &ChainSpec, x: &[u64]) -> Q {
    match spec {
        ChainSpec::PolyaLevel { alpha, .. }
        | ChainSpec::PolyaDownUp { alpha, .. }
        | ChainSpec::PolyaUpDown { alpha, .. }
        | ChainSpec::GibbsDm { alpha, .. } => dm_pmf(x, alpha),
        ChainSpec::Moran { n, m, p } => dm_pmf(x, &mutation_alpha(*n, m, p)),
        ChainSpec::Hubbell { n, m, p } => dm_pmf(x, &mutation_alpha(n - 1, m, p)),
        ChainSpec::BlLevel { caps, .. } | ChainSpec::BlDownUp { caps, .. } | ChainSpec::BlUpDown { caps, .. } => {
            hypergeometric_pmf(x, caps)
        }
        ChainSpec::Ehrenfest { p, .. } => multinomial_pmf(x, p),
        ChainSpec::NormalAr { .. } => unreachable!(),
    }
}

pub fn state_list(spec: &ChainSpec) -> Vec<Vec<u64>> {
    compositions(spec.population(), spec.dim(), spec.caps())
}

/// Sparse exact rows indexed by position in `state_list`.
pub fn exact_rows(spec: &ChainSpec, states: &[Vec<u64>]) -> Vec<Vec<(usize, Q)>> {
    let index: std::collections::HashMap<&Vec<u64>, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    states
        .iter()
        .map(|x| transition_row(spec, x).unwrap().into_iter().map(|(y, p)| (index[&y], p)).collect())
        .collect()
}

/// `sum_y (K^l(x, y) - m(y))^2 / m(y)` for `l = 0..=l_max`, by repeated
/// vector-matrix products in exact arithmetic.
pub fn brute_force_chisq(spec: &ChainSpec, x: &[u64], l_max: u64) -> Vec<Q> {
    let states = state_list(spec);
    let rows = exact_rows(spec, &states);
    let pi: Vec<Q> = states.iter().map(|s| stationary(spec, s)).collect();
    let mut mu: Vec<Q> = states.iter().map(|s| if s == x { Q::one() } else { Q::zero() }).collect();
    let mut out = Vec::new();
    for l in 0..=l_max {
        if l > 0 {
            let mut next = vec![Q::zero(); states.len()];
            for (i, row) in rows.iter().enumerate() {
                if mu[i].is_zero() {
                    continue;
                }
                for (j, p) in row {
                    next[*j] += &mu[i] * p;
                }
            }
            mu = next;
        }
        out.push(mu.iter().zip(&pi).map(|(a, b)| (a - b) * (a - b) / b).sum());
    }
    out
}

/// The same curve in doubles, for state spaces too large for exact powers.
pub fn brute_force_chisq_f64(spec: &ChainSpec, x: &[u64], l_max: u64) -> Vec<f64> {
    let states = state_list(spec);
    let rows: Vec<Vec<(usize, f64)>> =
        exact_rows(spec, &states).into_iter().map(|r| r.into_iter().map(|(j, p)| (j, to_f64(&p))).collect()).collect();
    let pi: Vec<f64> = states.iter().map(|s| to_f64(&stationary(spec, s))).collect();
    let mut mu: Vec<f64> = states.iter().map(|s| if s == x { 1.0 } else { 0.0 }).collect();
    let mut out = Vec::new();
    for l in 0..=l_max {
        if l > 0 {
            let mut next = vec![0.0; states.len()];
            for (i, row) in rows.iter().enumerate() {
                if mu[i] == 0.0 {
                    continue;
                }
                for (j, p) in row {
                    next[*j] += mu[i] * p;
                }
            }
            mu = next;
        }
        out.push(mu.iter().zip(&pi).map(|(a, b)| (a - b) * (a - b) / b).sum());
    }
    out
}

/// Corner diagonal of the Dirichlet-multinomial kernel: the falling-factorial form
/// `N_[n] / (N + A)_(n) * (A + 2n - 1) (A)_(n-1) (A - a)_(n) / (n! (a)_(n))`.
/// With `A = -|l|`, `a = -l_i` it is the hypergeometric diagonal.
pub fn dm_corner_diag(n: u64, pop: u64, abs_a: &Q, a_i: &Q) -> Q {
    if n == 0 {
        return Q::one();
    }
    let falling = (0..n).fold(Q::one(), |acc, j| acc * qi(pop as i64 - j as i64));
    let num = falling * (abs_a + qi(2 * n as i64 - 1)) * rising(abs_a, n - 1) * rising(&(abs_a - a_i), n);
    let den = rising(&(abs_a + qi(pop as i64)), n) * factorial(n) * rising(a_i, n);
    if den.is_zero() {
        // hypergeometric degrees above |l| - N carry no polynomials
        assert!(num.is_zero());
        return Q::zero();
    }
    num / den
}

pub fn multinomial_corner_diag(n: u64, pop: u64, p_i: &Q) -> Q {
    choose(pop, n) * num_traits::pow((Q::one() - p_i) / p_i, n as usize)
}

/// Alternating-sum form of the Dirichlet corner diagonal.
pub fn dirichlet_corner_diag_sum(n: u64, abs_a: &Q, a_i: &Q) -> Q {
    if n == 0 {
        return Q::one();
    }
    let mut s = Q::zero();
    for m in 0..=n {
        let t = choose(n, m) * rising(abs_a, m + n - 1) / rising(a_i, m);
        if (n - m) % 2 == 1 {
            s -= t;
        } else {
            s += t;
        }
    }
    (abs_a + qi(2 * n as i64 - 1)) * s / factorial(n)
}

/// `int N(mu, S)^2 / N(0, Sigma) - 1` with `S = Sigma - A^l Sigma A^l^T` and
/// `mu = A^l x`, by determinants.
pub fn gaussian_chisq(a: &DMatrix<f64>, sigma: &DMatrix<f64>, x: &DVector<f64>, l: u32) -> f64 {
    let al = (0..l).fold(DMatrix::identity(a.nrows(), a.ncols()), |acc, _| &acc * a);
    let s = sigma - &al * sigma * al.transpose();
    let mu = &al * x;
    let s_inv = s.clone().try_inverse().unwrap();
    let sigma_inv = sigma.clone().try_inverse().unwrap();
    let m = &s_inv * 2.0 - &sigma_inv;
    let m_inv = m.clone().try_inverse().unwrap();
    let b = &s_inv * &mu * 2.0;
    let quad = 0.5 * (b.transpose() * &m_inv * &b)[(0, 0)] - (mu.transpose() * &s_inv * &mu)[(0, 0)];
    let log = 0.5 * sigma.determinant().ln() - s.determinant().ln() - 0.5 * m.determinant().ln() + quad;
    log.exp() - 1.0
}

/// Reversible AR instance: `A = Sigma^{1/2} S Sigma^{-1/2}` with symmetric `S`
/// whose eigenvalues are `lambdas`.
pub fn reversible_ar(sigma: &DMatrix<f64>, rotation: &DMatrix<f64>, lambdas: &[f64]) -> DMatrix<f64> {
    let eig = sigma.clone().symmetric_eigen();
    let root = &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * eig.eigenvectors.transpose();
    let root_inv =
        &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt())) * eig.eigenvectors.transpose();
    let s = rotation * DMatrix::from_diagonal(&DVector::from_column_slice(lambdas)) * rotation.transpose();
    root * s * root_inv
}

pub fn abs_max(v: &[Q]) -> Q {
    v.iter().map(|r| r.abs()).max().unwrap_or_else(Q::zero)
}

/// Projection kernels by exact Gram-Schmidt on monomials in the first `d - 1`
/// coordinates under the weights `pi`. Returns `h[n][i][j]` over `states`.
pub fn gram_schmidt_kernels(states: &[Vec<u64>], pi: &[Q], max_degree: u64) -> Vec<Vec<Vec<Q>>> {
    let d = states[0].len();
    let k = states.len();
    let dot = |a: &[Q], b: &[Q]| -> Q { a.iter().zip(b).zip(pi).map(|((u, v), w)| u * v * w).sum() };
    let mut basis: Vec<(u64, Vec<Q>, Q)> = Vec::new();
    for deg in 0..=max_degree {
        let exps = if d == 1 { if deg == 0 { vec![vec![]] } else { vec![] } } else { compositions(deg, d - 1, None) };
        for e in exps {
            let mut v: Vec<Q> = states
                .iter()
                .map(|x| e.iter().zip(x).fold(Q::one(), |acc, (p, xi)| acc * num_traits::pow(qi(*xi as i64), *p as usize)))
                .collect();
            for (_, b, nb) in &basis {
                let c = dot(&v, b) / nb;
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= &c * bi;
                }
            }
            if v.iter().any(|t| !t.is_zero()) {
                let nv = dot(&v, &v);
                basis.push((deg, v, nv));
            }
        }
    }
    (0..=max_degree)
        .map(|n| {
            let mut h = vec![vec![Q::zero(); k]; k];
            for (_, b, nb) in basis.iter().filter(|t| t.0 == n) {
                for i in 0..k {
                    for j in 0..k {
                        h[i][j] += &b[i] * &b[j] / nb;
                    }
                }
            }
            h
        })
        .collect()
}
