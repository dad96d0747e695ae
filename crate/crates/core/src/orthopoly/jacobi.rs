use super::{tail_sum, MultiIndex};
use crate::numerics::{falling_factorial, int, rising_factorial, Field};

/// Shifted Jacobi `J_n(z; a, b) = 2F1(-n, n+a+b-1; a; z)`.
pub fn jacobi_uni<T: Field>(n: u64, z: &T, a: &T, b: &T) -> T {
    let c = int::<T>(n as i64 - 1) + a.clone() + b.clone();
    let mut term = T::one();
    let mut acc = T::one();
    for k in 0..n {
        let kf = k as i64;
        term = term * int::<T>(kf - n as i64) * (c.clone() + int(kf)) * z.clone() / ((a.clone() + int(kf)) * int(kf + 1));
        acc = acc + term.clone();
    }
    acc
}

/// `r^n J_n(z/r; a, b)` expanded as a homogeneous polynomial in `(z, r)`, so
/// `r = 0` needs no special case.
fn homogenized_factor<T: Field>(n: u64, z: &T, r: &T, a: &T, b: &T) -> T {
    let c = int::<T>(n as i64 - 1) + a.clone() + b.clone();
    let mut coef = T::one();
    let mut acc = r.powu(n);
    for k in 0..n {
        let kf = k as i64;
        coef = coef * int::<T>(kf - n as i64) * (c.clone() + int(kf)) / ((a.clone() + int(kf)) * int(kf + 1));
        acc = acc + coef.clone() * z.powu(k + 1) * r.powu(n - k - 1);
    }
    acc
}

/// Multivariate Jacobi polynomial on the simplex.
pub fn jacobi_multi<T: Field>(n: &MultiIndex, z: &[T], alpha: &[T]) -> T {
    let d = alpha.len();
    assert_eq!(z.len(), d, "point and parameter dimensions disagree");
    assert_eq!(n.entries().len() + 1, d, "index and parameter dimensions disagree");
    let mut acc = T::one();
    for j in 1..d {
        let nj = n.entries()[j - 1];
        if nj == 0 {
            continue;
        }
        let r = tail_sum(z, j);
        let b = tail_sum(alpha, j + 1) + int(2 * n.tail(j + 1) as i64);
        acc = acc * homogenized_factor(nj, &z[j - 1], &r, &alpha[j - 1], &b);
    }
    acc
}

/// Squared norm under the Dirichlet law. The per-level denominator is
/// `(alpha_j)_(n_j)`.
pub fn jacobi_norm2<T: Field>(n: &MultiIndex, alpha: &[T]) -> T {
    let deg = n.degree();
    let mut num = T::one();
    let mut den = rising_factorial(&tail_sum(alpha, 1), 2 * deg);
    for j in 1..alpha.len() {
        let nj = n.entries()[j - 1];
        let tj = n.tail(j) as i64;
        let tn = n.tail(j + 1) as i64;
        num = num
            * rising_factorial(&(tail_sum(alpha, j) + int(tj + tn - 1)), nj)
            * rising_factorial(&(tail_sum(alpha, j + 1) + int(2 * tn)), nj)
            * falling_factorial(&int::<T>(nj as i64), nj);
        den = den * rising_factorial(&alpha[j - 1], nj);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{pdf_dirichlet, DirichletParams, SimplexPoint};
    use crate::numerics::quadrature::{gauss_legendre_unit, simplex_rule};
    use crate::numerics::{parse_rational, ExactScalar};
    use crate::orthopoly::{hahn_multi, hahn_norm2, multi_indices};
    use statrs::function::beta::beta;

    #[test]
    fn beta_orthogonality() {
        let (a, b) = (1.0, 2.0);
        let rule = gauss_legendre_unit(20);
        let w = |z: f64| z.powf(a - 1.0) * (1.0 - z).powf(b - 1.0) / beta(a, b);
        let ip = |n: u64, m: u64| rule.integrate(|z| jacobi_uni(n, &z, &a, &b) * jacobi_uni(m, &z, &a, &b) * w(z));
        assert!(ip(1, 2).abs() < 1e-8);
        assert!((ip(0, 0) - 1.0).abs() < 1e-12);
        for n in 1..=4 {
            let norm = jacobi_norm2(&MultiIndex::new(vec![n]), &[a, b]);
            assert!((ip(n, n) - norm).abs() < 1e-10, "{n}");
        }
    }

    #[test]
    fn dirichlet_gram_in_three_colors() {
        let alpha = [1.0, 2.0, 3.0];
        let params = DirichletParams::new(["1", "2", "3"].iter().map(|s| parse_rational(s).unwrap()).collect()).unwrap();
        let pts = simplex_rule(3, 12);
        let idx: Vec<MultiIndex> = (0..=3).flat_map(|k| multi_indices(k, 3)).collect();
        for n in &idx {
            for m in &idx {
                let s: f64 = pts
                    .iter()
                    .map(|(z, w)| {
                        let dens = pdf_dirichlet(&SimplexPoint::new(z.clone()).unwrap(), &params).unwrap();
                        w * dens * jacobi_multi(n, z, &alpha) * jacobi_multi(m, z, &alpha)
                    })
                    .sum();
                let expect = if n == m { jacobi_norm2(n, &alpha) } else { 0.0 };
                assert!((s - expect).abs() < 1e-9, "{n:?} {m:?}: {s} vs {expect}");
            }
        }
    }

    #[test]
    fn zero_tail_mass_is_a_limit() {
        let alpha = [1.0, 2.0, 3.0];
        let n = MultiIndex::new(vec![1, 2]);
        let at = |eps: f64| jacobi_multi(&n, &[1.0 - 2.0 * eps, eps, eps], &alpha);
        assert!((at(0.0) - at(1e-9)).abs() < 1e-6);
        assert_eq!(jacobi_multi(&MultiIndex::new(vec![0, 0]), &[0.2, 0.3, 0.5], &alpha), 1.0);
    }

    #[test]
    fn hahn_scaling_limit() {
        // N^{|n|} Q_n(Nz) / ((-1)^{|n|} prod normalizers) approaches J_n(z)
        let alpha_q: Vec<ExactScalar> = ["1", "2", "3"].iter().map(|s| parse_rational(s).unwrap()).collect();
        let alpha = [1.0, 2.0, 3.0];
        let big = 10_000u64;
        let x = [2000u64, 3000, 5000];
        let z = [0.2, 0.3, 0.5];
        for k in 1..=3 {
            for n in multi_indices(k, 3) {
                let h = hahn_multi(&n, &x, big, &alpha_q).unwrap().to_f64();
                // both systems have the same leading monomial up to this constant
                let ratio = (hahn_norm2(&n, big, &alpha_q).unwrap().to_f64() / jacobi_norm2(&n, &alpha)).sqrt();
                let j = jacobi_multi(&n, &z, &alpha);
                assert!((h / ratio - j).abs() < 1e-3 * (1.0 + j.abs()), "{n:?}: {} vs {j}", h / ratio);
            }
        }
    }
}
