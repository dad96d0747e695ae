//! Chain families: parameters, state spaces, exact transition rows, samplers
//! and the Gaussian autoregressive process.

mod normal;
mod rows;
mod sampler;
mod serde_helpers;

pub use normal::{image_gibbs_model, noise_covariance, normal_ar_check, spectral_radius, ImageModel, NormalArCheck, CHECK_TOL};
pub use rows::{build_transition_matrix, transition_row, transition_row_capped, Row, TransitionMatrix};
pub use sampler::{step, watterson, ChainSampler, State};

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelFamily;
use crate::numerics::{
    biguint_to_u64, count_bounded_compositions, count_compositions, enumerate_compositions, ExactScalar,
};
use crate::orthopoly::PolynomialFamily;

/// Default ceiling on the number of states a row or state-space walk may touch.
pub const DEFAULT_STATE_CAP: u64 = 200_000;

/// Ceiling for dense or sparse matrix oracles.
pub const MATRIX_STATE_CAP: u64 = 5_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ChainSpec {
    PolyaLevel {
        n: u64,
        #[serde(with = "serde_helpers::ratios")]
        alpha: Vec<ExactScalar>,
        s: u64,
    },
    PolyaDownUp {
        n: u64,
        #[serde(with = "serde_helpers::ratios")]
        alpha: Vec<ExactScalar>,
        s: u64,
    },
    PolyaUpDown {
        n: u64,
        #[serde(with = "serde_helpers::ratios")]
        alpha: Vec<ExactScalar>,
        s: u64,
    },
    Moran {
        n: u64,
        #[serde(with = "serde_helpers::ratio")]
        m: ExactScalar,
        #[serde(with = "serde_helpers::ratios")]
        p: Vec<ExactScalar>,
    },
    Hubbell {
        n: u64,
        #[serde(with = "serde_helpers::ratio")]
        m: ExactScalar,
        #[serde(with = "serde_helpers::ratios")]
        p: Vec<ExactScalar>,
    },
    GibbsDm {
        n: u64,
        #[serde(with = "serde_helpers::ratios")]
        alpha: Vec<ExactScalar>,
    },
    BlLevel { caps: Vec<u64>, n: u64, s: u64 },
    BlDownUp { caps: Vec<u64>, n: u64, s: u64 },
    BlUpDown { caps: Vec<u64>, n: u64, s: u64 },
    Ehrenfest {
        n: u64,
        #[serde(with = "serde_helpers::ratios")]
        p: Vec<ExactScalar>,
        s: u64,
    },
    NormalAr {
        #[serde(with = "serde_helpers::matrix")]
        a: DMatrix<f64>,
        #[serde(with = "serde_helpers::matrix")]
        sigma: DMatrix<f64>,
    },
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn check_positive(v: &[ExactScalar], name: &str) -> Result<()> {
    if v.is_empty() {
        return Err(invalid(format!("{name} is empty")));
    }
    if let Some(i) = v.iter().position(|a| !a.is_positive()) {
        return Err(invalid(format!("{name}_{} must be positive", i + 1)));
    }
    Ok(())
}

fn check_simplex(p: &[ExactScalar]) -> Result<()> {
    check_positive(p, "p")?;
    let total: ExactScalar = p.iter().sum();
    if !total.is_one() {
        return Err(invalid(format!("p must sum to 1, got {total}")));
    }
    Ok(())
}

fn check_rate(m: &ExactScalar) -> Result<()> {
    if !m.is_positive() || *m >= ExactScalar::one() {
        return Err(invalid("mutation rate m must lie in (0, 1)"));
    }
    Ok(())
}

impl ChainSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ChainSpec::PolyaLevel { .. } => "polya-level",
            ChainSpec::PolyaDownUp { .. } => "polya-downup",
            ChainSpec::PolyaUpDown { .. } => "polya-updown",
            ChainSpec::Moran { .. } => "moran",
            ChainSpec::Hubbell { .. } => "hubbell",
            ChainSpec::GibbsDm { .. } => "gibbs-dm",
            ChainSpec::BlLevel { .. } => "bl-level",
            ChainSpec::BlDownUp { .. } => "bl-downup",
            ChainSpec::BlUpDown { .. } => "bl-updown",
            ChainSpec::Ehrenfest { .. } => "ehrenfest",
            ChainSpec::NormalAr { .. } => "normal-ar",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ChainSpec::PolyaLevel { n, alpha, s }
            | ChainSpec::PolyaDownUp { n, alpha, s }
            | ChainSpec::PolyaUpDown { n, alpha, s } => {
                check_positive(alpha, "alpha")?;
                if s > n {
                    return Err(invalid(format!("s = {s} exceeds N = {n}")));
                }
            }
            ChainSpec::Moran { n, m, p } => {
                check_rate(m)?;
                check_simplex(p)?;
                if *n == 0 {
                    return Err(invalid("N must be positive"));
                }
            }
            ChainSpec::Hubbell { n, m, p } => {
                check_rate(m)?;
                check_simplex(p)?;
                if *n < 2 {
                    return Err(invalid("the Hubbell process needs N >= 2"));
                }
            }
            ChainSpec::GibbsDm { alpha, .. } => check_positive(alpha, "alpha")?,
            ChainSpec::BlLevel { caps, n, s } | ChainSpec::BlDownUp { caps, n, s } | ChainSpec::BlUpDown { caps, n, s } => {
                if caps.is_empty() {
                    return Err(invalid("l is empty"));
                }
                let total: u64 = caps.iter().sum();
                if *n >= total {
                    return Err(invalid(format!("N = {n} must be below |l| = {total}")));
                }
                if s > n {
                    return Err(invalid(format!("s = {s} exceeds N = {n}")));
                }
                let room = total - n;
                let needs_room = !matches!(self, ChainSpec::BlDownUp { .. });
                if needs_room && *s > room {
                    return Err(invalid(format!("s = {s} exceeds |l| - N = {room}")));
                }
            }
            ChainSpec::Ehrenfest { n, p, s } => {
                check_simplex(p)?;
                if s > n {
                    return Err(invalid(format!("s = {s} exceeds N = {n}")));
                }
            }
            ChainSpec::NormalAr { a, sigma } => {
                let d = sigma.nrows();
                if d == 0 || sigma.ncols() != d || a.nrows() != d || a.ncols() != d {
                    return Err(invalid("A and Sigma must be square of equal size"));
                }
                if (sigma - sigma.transpose()).amax() > CHECK_TOL * sigma.amax().max(1.0) {
                    return Err(invalid("Sigma is not symmetric"));
                }
                if sigma.clone().cholesky().is_none() {
                    return Err(invalid("Sigma is not positive definite"));
                }
            }
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, ChainSpec::NormalAr { .. })
    }

    /// Number of colors (or the ambient dimension for the AR process).
    pub fn dim(&self) -> usize {
        match self {
            ChainSpec::PolyaLevel { alpha, .. }
            | ChainSpec::PolyaDownUp { alpha, .. }
            | ChainSpec::PolyaUpDown { alpha, .. }
            | ChainSpec::GibbsDm { alpha, .. } => alpha.len(),
            ChainSpec::Moran { p, .. } | ChainSpec::Hubbell { p, .. } | ChainSpec::Ehrenfest { p, .. } => p.len(),
            ChainSpec::BlLevel { caps, .. } | ChainSpec::BlDownUp { caps, .. } | ChainSpec::BlUpDown { caps, .. } => {
                caps.len()
            }
            ChainSpec::NormalAr { sigma, .. } => sigma.nrows(),
        }
    }

    /// Population size `N`; zero for the AR process.
    pub fn population(&self) -> u64 {
        match self {
            ChainSpec::PolyaLevel { n, .. }
            | ChainSpec::PolyaDownUp { n, .. }
            | ChainSpec::PolyaUpDown { n, .. }
            | ChainSpec::Moran { n, .. }
            | ChainSpec::Hubbell { n, .. }
            | ChainSpec::GibbsDm { n, .. }
            | ChainSpec::BlLevel { n, .. }
            | ChainSpec::BlDownUp { n, .. }
            | ChainSpec::BlUpDown { n, .. }
            | ChainSpec::Ehrenfest { n, .. } => *n,
            ChainSpec::NormalAr { .. } => 0,
        }
    }

    /// Stationary Dirichlet-multinomial parameter for the Pólya-derived families.
    pub fn dm_alpha(&self) -> Option<Vec<ExactScalar>> {
        match self {
            ChainSpec::PolyaLevel { alpha, .. }
            | ChainSpec::PolyaDownUp { alpha, .. }
            | ChainSpec::PolyaUpDown { alpha, .. }
            | ChainSpec::GibbsDm { alpha, .. } => Some(alpha.clone()),
            ChainSpec::Moran { n, m, p } => Some(mutation_alpha(*n, m, p)),
            ChainSpec::Hubbell { n, m, p } => Some(mutation_alpha(n - 1, m, p)),
            _ => None,
        }
    }

    /// Kernel-polynomial family of the stationary law.
    pub fn kernel_family(&self) -> Result<KernelFamily> {
        let n = self.population();
        if let Some(alpha) = self.dm_alpha() {
            return Ok(KernelFamily::DirichletMultinomial { n, alpha });
        }
        match self {
            ChainSpec::BlLevel { caps, .. } | ChainSpec::BlDownUp { caps, .. } | ChainSpec::BlUpDown { caps, .. } => {
                Ok(KernelFamily::Hypergeometric { n, caps: caps.clone() })
            }
            ChainSpec::Ehrenfest { p, .. } => Ok(KernelFamily::Multinomial { n, p: p.clone() }),
            _ => Err(Error::Unsupported("the AR process has no discrete kernel family".into())),
        }
    }

    /// Orthogonal system that diagonalizes the chain.
    pub fn polynomial_family(&self) -> PolynomialFamily {
        if let Some(alpha) = self.dm_alpha() {
            return PolynomialFamily::Hahn { alpha };
        }
        match self {
            ChainSpec::BlLevel { caps, .. } | ChainSpec::BlDownUp { caps, .. } | ChainSpec::BlUpDown { caps, .. } => {
                PolynomialFamily::HahnNegative { caps: caps.clone() }
            }
            ChainSpec::Ehrenfest { p, .. } => PolynomialFamily::Krawtchouk { p: p.clone() },
            _ => PolynomialFamily::Hermite,
        }
    }

    /// Per-color caps of the state space, if any.
    pub fn caps(&self) -> Option<&[u64]> {
        match self {
            ChainSpec::BlLevel { caps, .. } | ChainSpec::BlDownUp { caps, .. } | ChainSpec::BlUpDown { caps, .. } => {
                Some(caps)
            }
            _ => None,
        }
    }

    /// Number of states, exactly.
    pub fn state_count(&self) -> Result<num_bigint::BigUint> {
        if !self.is_finite() {
            return Err(Error::Unsupported("continuous state space".into()));
        }
        Ok(match self.caps() {
            Some(caps) => count_bounded_compositions(self.population(), caps),
            None => count_compositions(self.population(), self.dim()),
        })
    }

    /// Whether `x` is a state of this chain.
    pub fn contains(&self, x: &[u64]) -> bool {
        self.is_finite()
            && x.len() == self.dim()
            && x.iter().sum::<u64>() == self.population()
            && self.caps().is_none_or(|c| x.iter().zip(c).all(|(a, b)| a <= b))
    }

    /// Every state in colex order, refusing above `cap`.
    pub fn states(&self, cap: u64) -> Result<Vec<Vec<u64>>> {
        let count = self.state_count()?;
        if biguint_to_u64(&count).is_none_or(|c| c > cap) {
            return Err(Error::capacity("state space", count, cap));
        }
        Ok(enumerate_compositions(self.population(), self.dim(), self.caps())
            .into_iter()
            .map(|c| c.into_counts())
            .collect())
    }

    /// Stationary probability of `x`, exactly.
    pub fn stationary_pmf(&self, x: &[u64]) -> Result<ExactScalar> {
        if !self.contains(x) {
            return Ok(ExactScalar::zero());
        }
        if let Some(alpha) = self.dm_alpha() {
            return Ok(crate::distributions::dm_weight(x, &alpha));
        }
        match self {
            ChainSpec::BlLevel { caps, n, .. } | ChainSpec::BlDownUp { caps, n, .. } | ChainSpec::BlUpDown { caps, n, .. } => {
                Ok(crate::distributions::hypergeometric_weight(x, *n, caps))
            }
            ChainSpec::Ehrenfest { p, .. } => Ok(crate::distributions::multinomial_weight(x, p)),
            _ => Err(Error::Unsupported("continuous state space".into())),
        }
    }

    pub(crate) fn require_state(&self, x: &[u64]) -> Result<()> {
        if !self.contains(x) {
            return Err(Error::Domain(format!("{x:?} is not a state of this {} chain", self.name())));
        }
        Ok(())
    }
}

/// `alpha_i = k m p_i / (1 - m)`, with `k = N` for Moran and `N - 1` for Hubbell.
pub fn mutation_alpha(k: u64, m: &ExactScalar, p: &[ExactScalar]) -> Vec<ExactScalar> {
    let scale = ExactScalar::from_integer(k.into()) * m / (ExactScalar::one() - m);
    p.iter().map(|pi| &scale * pi).collect()
}

/// Inverse of [`mutation_alpha`]: `(m, p)` from a Dirichlet parameter.
pub fn mutation_from_alpha(k: u64, alpha: &[ExactScalar]) -> (ExactScalar, Vec<ExactScalar>) {
    let total: ExactScalar = alpha.iter().sum();
    let k = ExactScalar::from_integer(k.into());
    let m = &total / (&k + &total);
    let p = alpha.iter().map(|a| a / &total).collect();
    (m, p)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::numerics::parse_rational;

    pub(crate) fn qs(v: &[&str]) -> Vec<ExactScalar> {
        v.iter().map(|s| parse_rational(s).unwrap()).collect()
    }

    #[test]
    fn validation() {
        assert!(ChainSpec::PolyaLevel { n: 3, alpha: qs(&["1", "1"]), s: 4 }.validate().is_err());
        assert!(ChainSpec::PolyaLevel { n: 3, alpha: qs(&["1", "0"]), s: 1 }.validate().is_err());
        assert!(ChainSpec::Moran { n: 3, m: qs(&["1"])[0].clone(), p: qs(&["1/2", "1/2"]) }.validate().is_err());
        assert!(ChainSpec::Hubbell { n: 1, m: qs(&["1/2"])[0].clone(), p: qs(&["1/2", "1/2"]) }.validate().is_err());
        assert!(ChainSpec::BlLevel { caps: vec![2, 1], n: 2, s: 2 }.validate().is_err());
        assert!(ChainSpec::BlDownUp { caps: vec![2, 1], n: 2, s: 2 }.validate().is_ok());
        assert!(ChainSpec::BlDownUp { caps: vec![1, 1], n: 2, s: 1 }.validate().is_err());
        assert!(ChainSpec::Ehrenfest { n: 2, p: qs(&["1/3", "1/3"]), s: 1 }.validate().is_err());
        let a = DMatrix::zeros(2, 2);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(ChainSpec::NormalAr { a, sigma: bad }.validate().is_err());
    }

    #[test]
    fn state_spaces() {
        let bl = ChainSpec::BlLevel { caps: vec![2, 2, 2], n: 2, s: 1 };
        assert_eq!(bl.states(100).unwrap().len(), 6);
        let polya = ChainSpec::PolyaLevel { n: 3, alpha: qs(&["1", "2", "3"]), s: 1 };
        assert_eq!(polya.states(100).unwrap().len(), 10);
        assert!(matches!(polya.states(5), Err(Error::Capacity { .. })));
        let total: ExactScalar = polya.states(100).unwrap().iter().map(|x| polya.stationary_pmf(x).unwrap()).sum();
        assert!(total.is_one());
    }

    #[test]
    fn mutation_reparametrization_round_trips() {
        let p = qs(&["1/5", "3/10", "1/2"]);
        let m = qs(&["1/20"])[0].clone();
        let alpha = mutation_alpha(19, &m, &p);
        assert_eq!(mutation_from_alpha(19, &alpha), (m, p));
    }

    #[test]
    fn serde_round_trip() {
        let spec = ChainSpec::Hubbell { n: 20, m: qs(&["0.05"])[0].clone(), p: qs(&["1/5"; 5]) };
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"family\":\"hubbell\""));
        assert_eq!(serde_json::from_str::<ChainSpec>(&text).unwrap(), spec);
        let ar = ChainSpec::NormalAr { a: DMatrix::identity(2, 2) * 0.5, sigma: DMatrix::identity(2, 2) };
        let back: ChainSpec = serde_json::from_str(&serde_json::to_string(&ar).unwrap()).unwrap();
        assert_eq!(back, ar);
    }
}
