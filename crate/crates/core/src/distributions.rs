//! Stationary laws: Dirichlet, multinomial, Dirichlet-multinomial,
//! multivariate hypergeometric and multivariate normal.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_traits::Signed;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::numerics::{
    binomial, biguint_to_ratio, multinomial_coefficient, ratio_to_f64, rising_factorial, BoundedComposition,
    Composition, ExactScalar, Field, LogScalar,
};

#[derive(Clone, Debug, PartialEq)]
pub struct DirichletParams {
    alpha: Vec<ExactScalar>,
    total: ExactScalar,
}

impl DirichletParams {
    pub fn new(alpha: Vec<ExactScalar>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidParameter("alpha must be nonempty".into()));
        }
        if alpha.iter().any(|a| !a.is_positive()) {
            return Err(Error::InvalidParameter("alpha entries must be positive".into()));
        }
        let total = alpha.iter().fold(ExactScalar::zero(), |acc, a| acc + a);
        Ok(DirichletParams { alpha, total })
    }

    pub fn symmetric(d: usize, value: ExactScalar) -> Result<Self> {
        Self::new(vec![value; d])
    }

    pub fn alpha(&self) -> &[ExactScalar] {
        &self.alpha
    }

    pub fn total(&self) -> &ExactScalar {
        &self.total
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha_f64(&self) -> Vec<f64> {
        self.alpha.iter().map(ratio_to_f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexPoint {
    p: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.iter().any(|&v| !(0.0..=1.0).contains(&v) || !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("simplex entries must lie in [0,1]: {p:?}")));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("simplex entries sum to {s}, not 1")));
        }
        Ok(SimplexPoint { p })
    }

    pub fn from_exact(p: &[ExactScalar]) -> Result<Self> {
        Self::new(p.iter().map(ratio_to_f64).collect())
    }

    pub fn coords(&self) -> &[f64] {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }
}

#[derive(Clone, Debug)]
pub struct GaussianParams {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl GaussianParams {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        if !cov.is_square() || cov.nrows() != mean.len() {
            return Err(Error::InvalidParameter("covariance shape does not match mean".into()));
        }
        let asym = (&cov - cov.transpose()).abs().max();
        if asym > 1e-12 {
            return Err(Error::InvalidParameter(format!("covariance not symmetric (|S - S^T| = {asym:e})")));
        }
        let chol = Cholesky::new(cov.clone())
            .ok_or_else(|| Error::LinearAlgebra("covariance is not positive definite".into()))?;
        Ok(GaussianParams { mean, cov, chol })
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn pdf(&self, x: &DVector<f64>) -> f64 {
        let diff = x - &self.mean;
        let sol = self.chol.solve(&diff);
        let quad = diff.dot(&sol);
        let logdet: f64 = 2.0 * self.chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let d = self.dim() as f64;
        (-0.5 * (quad + logdet + d * (2.0 * std::f64::consts::PI).ln())).exp()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let z = DVector::from_fn(self.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        &self.mean + self.chol.l() * z
    }
}

/// `C(N; x) prod (a_i)_(x_i) / |a|_(N)` for any parameter vector, including
/// the negative integers that give the hypergeometric law.
pub fn dm_weight<T: Field>(x: &[u64], alpha: &[T]) -> T {
    let n: u64 = x.iter().sum();
    let coeff = T::from_ratio(&biguint_to_ratio(&multinomial_coefficient(&Composition::new(x.to_vec()))));
    let total = alpha.iter().cloned().fold(T::zero(), |acc, a| acc + a);
    let mut num = coeff;
    for (xi, ai) in x.iter().zip(alpha) {
        num = num * rising_factorial(ai, *xi);
    }
    num / rising_factorial(&total, n)
}

pub fn pmf_dirichlet_multinomial(x: &Composition, params: &DirichletParams) -> ExactScalar {
    dm_weight(x.counts(), params.alpha())
}

/// Log-domain DM pmf through log-gamma, for populations too large for exact
/// rationals.
pub fn pmf_dirichlet_multinomial_log(x: &[u64], alpha: &[f64]) -> LogScalar {
    let n: u64 = x.iter().sum();
    let total: f64 = alpha.iter().sum();
    let mut ln = ln_gamma(n as f64 + 1.0) + ln_gamma(total) - ln_gamma(total + n as f64);
    for (&xi, &ai) in x.iter().zip(alpha) {
        ln += ln_gamma(ai + xi as f64) - ln_gamma(ai) - ln_gamma(xi as f64 + 1.0);
    }
    LogScalar::new(1, ln)
}

pub fn pmf_multinomial(x: &Composition, p: &SimplexPoint) -> f64 {
    multinomial_weight(x.counts(), p.coords())
}

pub fn multinomial_weight<T: Field>(x: &[u64], p: &[T]) -> T {
    let coeff = T::from_ratio(&biguint_to_ratio(&multinomial_coefficient(&Composition::new(x.to_vec()))));
    x.iter().zip(p).fold(coeff, |acc, (&xi, pi)| acc * pi.powu(xi))
}

/// `prod C(l_i, x_i) / C(|l|, N)`.
pub fn pmf_hypergeometric(x: &BoundedComposition, n: u64, caps: &[u64]) -> ExactScalar {
    hypergeometric_weight(x.point().counts(), n, caps)
}

pub fn hypergeometric_weight(x: &[u64], n: u64, caps: &[u64]) -> ExactScalar {
    if x.iter().sum::<u64>() != n || x.iter().zip(caps).any(|(a, b)| a > b) {
        return ExactScalar::zero();
    }
    let num = x.iter().zip(caps).fold(num_bigint::BigUint::from(1u32), |acc, (&xi, &li)| acc * binomial(li, xi));
    biguint_to_ratio(&num) / biguint_to_ratio(&binomial(caps.iter().sum(), n))
}

pub fn pdf_dirichlet(z: &SimplexPoint, params: &DirichletParams) -> Result<f64> {
    let alpha = params.alpha_f64();
    if z.dim() != alpha.len() {
        return Err(Error::InvalidParameter("dimension mismatch".into()));
    }
    let mut ln = ln_gamma(alpha.iter().sum());
    for (&zi, &ai) in z.coords().iter().zip(&alpha) {
        if zi == 0.0 {
            if ai < 1.0 {
                return Err(Error::Domain("density is infinite on this face".into()));
            }
            if ai > 1.0 {
                return Ok(0.0);
            }
            ln -= ln_gamma(ai);
            continue;
        }
        ln += (ai - 1.0) * zi.ln() - ln_gamma(ai);
    }
    Ok(ln.exp())
}

fn categorical<R: Rng + ?Sized>(weights: &[f64], total: f64, rng: &mut R) -> usize {
    let mut u = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Pólya sequential draws: each drawn color gains one unit of weight.
pub fn sample_dirichlet_multinomial<R: Rng + ?Sized>(n: u64, alpha: &[f64], rng: &mut R) -> Vec<u64> {
    let mut w = alpha.to_vec();
    let mut total: f64 = w.iter().sum();
    let mut out = vec![0u64; alpha.len()];
    for _ in 0..n {
        let i = categorical(&w, total, rng);
        out[i] += 1;
        w[i] += 1.0;
        total += 1.0;
    }
    out
}

/// Sequential draws without replacement from an urn holding `caps[i]` balls of color `i`.
pub fn sample_hypergeometric<R: Rng + ?Sized>(n: u64, caps: &[u64], rng: &mut R) -> Vec<u64> {
    let mut left: Vec<u64> = caps.to_vec();
    let mut total: u64 = left.iter().sum();
    assert!(n <= total, "cannot draw {n} from {total}");
    let mut out = vec![0u64; caps.len()];
    for _ in 0..n {
        let mut u = rng.random_range(0..total);
        let mut i = 0;
        while u >= left[i] {
            u -= left[i];
            i += 1;
        }
        out[i] += 1;
        left[i] -= 1;
        total -= 1;
    }
    out
}

pub fn sample_multinomial<R: Rng + ?Sized>(n: u64, p: &[f64], rng: &mut R) -> Vec<u64> {
    let total: f64 = p.iter().sum();
    let mut out = vec![0u64; p.len()];
    for _ in 0..n {
        out[categorical(p, total, rng)] += 1;
    }
    out
}

/// Gamma-ratio construction.
pub fn sample_dirichlet<R: Rng + ?Sized>(alpha: &[f64], rng: &mut R) -> Vec<f64> {
    let g: Vec<f64> = alpha.iter().map(|&a| Gamma::new(a, 1.0).expect("positive shape").sample(rng)).collect();
    let s: f64 = g.iter().sum();
    g.into_iter().map(|v| v / s).collect()
}

/// One of the stationary laws, ready for sampling.
#[derive(Clone, Debug)]
pub enum Law {
    DirichletMultinomial { n: u64, alpha: Vec<f64> },
    Multinomial { n: u64, p: Vec<f64> },
    Hypergeometric { n: u64, caps: Vec<u64> },
    Dirichlet { alpha: Vec<f64> },
    Gaussian(GaussianParams),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Draw {
    Counts(Vec<u64>),
    Point(Vec<f64>),
}

pub fn sample<R: Rng + ?Sized>(law: &Law, rng: &mut R) -> Draw {
    match law {
        Law::DirichletMultinomial { n, alpha } => Draw::Counts(sample_dirichlet_multinomial(*n, alpha, rng)),
        Law::Multinomial { n, p } => Draw::Counts(sample_multinomial(*n, p, rng)),
        Law::Hypergeometric { n, caps } => Draw::Counts(sample_hypergeometric(*n, caps, rng)),
        Law::Dirichlet { alpha } => Draw::Point(sample_dirichlet(alpha, rng)),
        Law::Gaussian(g) => Draw::Point(g.sample(rng).iter().copied().collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{binomial, enumerate_compositions, parse_rational};
    use crate::rng::replica_stream;
    use num_bigint::BigInt;

    fn q(p: i64, d: i64) -> ExactScalar {
        ExactScalar::new(BigInt::from(p), BigInt::from(d))
    }

    fn params(a: &[i64]) -> DirichletParams {
        DirichletParams::new(a.iter().map(|&v| q(v, 1)).collect()).unwrap()
    }

    #[test]
    fn dm_single_draw() {
        let p = params(&[1, 2, 3]);
        let x = Composition::new(vec![0, 1, 0]);
        assert_eq!(pmf_dirichlet_multinomial(&x, &p), q(2, 6));
    }

    #[test]
    fn dm_bose_einstein_is_uniform() {
        let p = params(&[1, 1, 1, 1]);
        let states = enumerate_compositions(3, 4, None);
        let expect = ExactScalar::new(1.into(), BigInt::from(binomial(6, 3)));
        for x in &states {
            assert_eq!(pmf_dirichlet_multinomial(x, &p), expect);
        }
    }

    #[test]
    fn exact_pmfs_sum_to_one() {
        let p = params(&[1, 2, 3]);
        let s = enumerate_compositions(3, 3, None)
            .iter()
            .fold(ExactScalar::zero(), |acc, x| acc + pmf_dirichlet_multinomial(x, &p));
        assert_eq!(s, q(1, 1));
        for n in 0..=6u64 {
            for d in 1..=4usize {
                let half = DirichletParams::symmetric(d, q(1, 2)).unwrap();
                let s = enumerate_compositions(n, d, None)
                    .iter()
                    .fold(ExactScalar::zero(), |acc, x| acc + pmf_dirichlet_multinomial(x, &half));
                assert_eq!(s, q(1, 1));
                let caps = vec![2u64; d];
                if n <= 2 * d as u64 {
                    let h = enumerate_compositions(n, d, Some(&caps))
                        .iter()
                        .fold(ExactScalar::zero(), |acc, x| acc + hypergeometric_weight(x.counts(), n, &caps));
                    assert_eq!(h, q(1, 1));
                }
                let pe: Vec<ExactScalar> = (1..=d as i64).map(|i| q(2 * i, (d * (d + 1)) as i64)).collect();
                let m = enumerate_compositions(n, d, None)
                    .iter()
                    .fold(ExactScalar::zero(), |acc, x| acc + multinomial_weight(x.counts(), &pe));
                assert_eq!(m, q(1, 1));
            }
        }
    }

    #[test]
    fn multinomial_examples() {
        let p = SimplexPoint::new(vec![0.2, 0.3, 0.5]).unwrap();
        let corner = Composition::corner(4, 3, 2);
        assert!((pmf_multinomial(&corner, &p) - 0.5f64.powi(4)).abs() < 1e-16);
        let half = SimplexPoint::new(vec![0.5, 0.5]).unwrap();
        assert!((pmf_multinomial(&Composition::new(vec![1, 1]), &half) - 0.5).abs() < 1e-16);
        let s: f64 = enumerate_compositions(4, 3, None).iter().map(|x| pmf_multinomial(x, &p)).sum();
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hypergeometric_examples() {
        let full = BoundedComposition::new(vec![2, 3], vec![2, 3]).unwrap();
        assert_eq!(pmf_hypergeometric(&full, 5, &[2, 3]), q(1, 1));
        let x = BoundedComposition::new(vec![1, 1], vec![2, 2]).unwrap();
        assert_eq!(pmf_hypergeometric(&x, 2, &[2, 2]), q(4, 6));
        // negative-parameter substitution in the DM formula
        let neg = [q(-2, 1), q(-2, 1)];
        for x in enumerate_compositions(2, 2, Some(&[2, 2])) {
            assert_eq!(dm_weight(x.counts(), &neg), hypergeometric_weight(x.counts(), 2, &[2, 2]));
        }
    }

    #[test]
    fn dm_approaches_multinomial() {
        let x = [2u64, 1, 1];
        let a = [1.0, 2.0, 3.0];
        let p: Vec<f64> = a.iter().map(|v| v / 6.0).collect();
        let target = multinomial_weight(&x, &p);
        let mut prev = f64::INFINITY;
        for t in [1e2, 1e4, 1e6] {
            let alpha: Vec<ExactScalar> = a.iter().map(|v| parse_rational(&format!("{}", v * t)).unwrap()).collect();
            let gap = (ratio_to_f64(&dm_weight(&x, &alpha)) - target).abs();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 1e-5);
    }

    #[test]
    fn log_dm_matches_exact() {
        let p = params(&[1, 2, 3]);
        for x in enumerate_compositions(5, 3, None) {
            let exact = ratio_to_f64(&pmf_dirichlet_multinomial(&x, &p));
            let log = pmf_dirichlet_multinomial_log(x.counts(), &[1.0, 2.0, 3.0]).to_f64();
            assert!((exact - log).abs() < 1e-12 * exact);
        }
    }

    #[test]
    fn dirichlet_density() {
        let flat = params(&[1, 1]);
        for z in [0.0, 0.3, 1.0] {
            let pt = SimplexPoint::new(vec![z, 1.0 - z]).unwrap();
            assert!((pdf_dirichlet(&pt, &flat).unwrap() - 1.0).abs() < 1e-14);
        }
        let p = params(&[2, 1]);
        let mid = SimplexPoint::new(vec![0.5, 0.5]).unwrap();
        assert!((pdf_dirichlet(&mid, &p).unwrap() - 1.0).abs() < 1e-14);
        let sharp = DirichletParams::new(vec![q(1, 2), q(1, 1)]).unwrap();
        let edge = SimplexPoint::new(vec![0.0, 1.0]).unwrap();
        assert!(matches!(pdf_dirichlet(&edge, &sharp), Err(Error::Domain(_))));
        let p3 = params(&[2, 3, 1]);
        let total: f64 = crate::numerics::quadrature::simplex_rule(3, 8)
            .iter()
            .map(|(z, w)| w * pdf_dirichlet(&SimplexPoint::new(z.clone()).unwrap(), &p3).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }

    #[test]
    fn gaussian_sample_mean() {
        let g = GaussianParams::new(DVector::zeros(2), DMatrix::identity(2, 2)).unwrap();
        let mut rng = replica_stream(1, 0);
        let n = 100_000;
        let mut acc = DVector::zeros(2);
        for _ in 0..n {
            acc += g.sample(&mut rng);
        }
        acc /= n as f64;
        assert!(acc.amax() < 4.0 / (n as f64).sqrt());
    }

    #[test]
    fn dm_sampler_goodness_of_fit() {
        let mut rng = replica_stream(2, 0);
        let states = enumerate_compositions(3, 3, None);
        let n = 100_000;
        let mut counts = vec![0usize; states.len()];
        for _ in 0..n {
            let x = sample_dirichlet_multinomial(3, &[1.0, 1.0, 1.0], &mut rng);
            counts[states.iter().position(|s| s.counts() == x.as_slice()).unwrap()] += 1;
        }
        let p = 0.1;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        for c in counts {
            assert!((c as f64 / n as f64 - p).abs() < 3.0 * se + 1e-3);
        }
    }

    #[test]
    fn forced_hypergeometric_draw() {
        let mut rng = replica_stream(3, 0);
        for _ in 0..10 {
            assert_eq!(sample_hypergeometric(5, &[2, 0, 3], &mut rng), vec![2, 0, 3]);
        }
        assert_eq!(sample(&Law::Hypergeometric { n: 5, caps: vec![2, 0, 3] }, &mut rng), Draw::Counts(vec![2, 0, 3]));
    }
}
