//! Exact chi-square distance from the spectral sum, the closed-form mixing
//! thresholds, and the Gaussian AR chi-square.

use nalgebra::{DMatrix, DVector};
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::chains::{build_transition_matrix, ChainSpec};
use crate::error::{Error, Result};
use crate::numerics::{ratio_to_f64, ExactScalar, Field, LogScalar};
use crate::spectra::{eigenvalue, eigenvalue_ladder, max_degree, normal_ar_spectrum};

/// Populations up to this size get exact eigenvalues for every family.
const EXACT_EIGEN_POP: u64 = 2_000;

/// `ln |r|` for an exact rational, accurate when `r` is close to 1.
pub fn ln_abs_ratio(r: &ExactScalar) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    let gap = ExactScalar::one() - r.abs();
    let g = ratio_to_f64(&gap);
    if g.abs() < 0.5 {
        (-g).ln_1p()
    } else {
        LogScalar::from_ratio(r).ln_abs()
    }
}

/// `h_n(x, x)` for `n = 0..=max`, as signed log-magnitudes.
fn diag_kernels(spec: &ChainSpec, start: &[u64], max: u64) -> Result<Vec<LogScalar>> {
    let pop = spec.population();
    let family = spec.kernel_family()?;
    let corner = start.iter().position(|&v| v == pop).filter(|_| pop > 0);
    let Some(i) = corner else {
        return (0..=max).map(|n| family.kernel(n, start, start).map(|h| LogScalar::from_ratio(&h))).collect();
    };
    let f = |r: ExactScalar| LogScalar::from_f64(ratio_to_f64(&r));
    let int = |v: u64| ExactScalar::from_integer(v.into());
    if let ChainSpec::Ehrenfest { p, .. } = spec {
        // C(N, n) ((1 - p_i)/p_i)^n
        let r = LogScalar::from_ratio(&((ExactScalar::one() - &p[i]) / &p[i]));
        let mut out = vec![LogScalar::ONE];
        let mut c = LogScalar::ONE;
        for n in 1..=max {
            c = c * f(int(pop - n + 1) / int(n)) * r;
            out.push(c);
        }
        return Ok(out);
    }
    // C(N,n) (A+2n-1) (A)_(n-1) (A-a)_(n) / ((A+N)_(n) (a)_(n)), with
    // A = -|l| and a = -l_i for the hypergeometric law
    let (abs_a, a_i) = match spec.dm_alpha() {
        Some(alpha) => (alpha.iter().sum::<ExactScalar>(), alpha[i].clone()),
        None => {
            let caps = spec.caps().expect("hypergeometric family");
            if caps[i] < pop {
                return Err(Error::Domain(format!("N e_{} is outside the support: l_{} < N", i + 1, i + 1)));
            }
            (-int(caps.iter().sum()), -int(caps[i]))
        }
    };
    let rest = &abs_a - &a_i;
    let mut out = vec![LogScalar::ONE];
    let (mut binom, mut p_a, mut p_rest, mut p_top, mut p_ai) =
        (LogScalar::ONE, LogScalar::ONE, LogScalar::ONE, LogScalar::ONE, LogScalar::ONE);
    for n in 1..=max {
        let k = int(n - 1);
        binom = binom * f(int(pop - n + 1) / int(n));
        if n >= 2 {
            p_a = p_a * f(&abs_a + int(n - 2));
        }
        p_rest = p_rest * f(&rest + &k);
        p_top = p_top * f(&abs_a + int(pop) + &k);
        p_ai = p_ai * f(&a_i + &k);
        let lead = f(&abs_a + int(2 * n - 1));
        let num = binom * lead * p_a * p_rest;
        out.push(if num.sign() == 0 { LogScalar::ZERO } else { num / (p_top * p_ai) });
    }
    Ok(out)
}

/// Precomputed `(ln |beta_n|, h_n(x, x))` pairs: `chi^2(l) = sum beta_n^{2l} h_n`.
#[derive(Clone, Debug)]
pub struct SpectralSum {
    terms: Vec<(f64, LogScalar)>,
}

impl SpectralSum {
    pub fn new(spec: &ChainSpec, start: &[u64]) -> Result<Self> {
        spec.validate()?;
        if !spec.contains(start) {
            return Err(Error::Domain(format!("{start:?} is not a state of this {} chain", spec.name())));
        }
        let max = max_degree(spec);
        let h = diag_kernels(spec, start, max)?;
        let exact = spec.population() <= EXACT_EIGEN_POP
            || matches!(spec, ChainSpec::Moran { .. } | ChainSpec::Hubbell { .. } | ChainSpec::GibbsDm { .. });
        let ln_betas: Vec<f64> = if exact {
            eigenvalue_ladder::<ExactScalar>(spec, max)?.iter().map(ln_abs_ratio).collect()
        } else {
            eigenvalue_ladder::<f64>(spec, max)?.iter().map(|b| b.abs().ln()).collect()
        };
        let terms = ln_betas.into_iter().zip(h.into_iter().skip(1)).collect();
        Ok(SpectralSum { terms })
    }

    pub fn terms(&self) -> &[(f64, LogScalar)] {
        &self.terms
    }

    /// `ln chi^2(l)`; `-inf` when the distance is zero.
    pub fn ln_eval(&self, l: u64) -> f64 {
        let logs: Vec<f64> = self
            .terms
            .iter()
            .filter(|(_, h)| h.sign() > 0)
            .filter_map(|(lb, h)| {
                if l == 0 {
                    return Some(h.ln_abs());
                }
                let e = 2.0 * l as f64 * lb + h.ln_abs();
                (e > f64::NEG_INFINITY).then_some(e)
            })
            .collect();
        let Some(top) = logs.iter().copied().reduce(f64::max) else {
            return f64::NEG_INFINITY;
        };
        // positive terms: scaled Neumaier sum
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for e in logs {
            let v = (e - top).exp();
            let t = sum + v;
            comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
            sum = t;
        }
        top + (sum + comp).ln()
    }

    pub fn eval(&self, l: u64) -> f64 {
        self.ln_eval(l).exp()
    }
}

/// `chi^2_x(l) = sum_{n>=1} beta_n^{2l} h_n(x, x)` in log-domain doubles.
pub fn chisq_exact(spec: &ChainSpec, start: &[u64], l: u64) -> Result<f64> {
    Ok(SpectralSum::new(spec, start)?.eval(l))
}

/// The same sum in exact rationals (small sizes).
pub fn chisq_exact_rational(spec: &ChainSpec, start: &[u64], l: u64) -> Result<ExactScalar> {
    spec.validate()?;
    if !spec.contains(start) {
        return Err(Error::Domain(format!("{start:?} is not a state of this {} chain", spec.name())));
    }
    let family = spec.kernel_family()?;
    let mut acc = ExactScalar::zero();
    for n in 1..=max_degree(spec) {
        let beta: ExactScalar = eigenvalue(spec, n)?;
        if beta.is_zero() && l > 0 {
            continue;
        }
        acc += beta.powu(2 * l) * family.kernel(n, start, start)?;
    }
    Ok(acc)
}

/// Brute force from matrix powers: `sum_y (K^l(x,y) - m(y))^2 / m(y)`, and
/// the exact total variation distance.
pub fn chisq_brute_force(spec: &ChainSpec, start: &[u64], l_max: u64) -> Result<Vec<(ExactScalar, ExactScalar)>> {
    let k = build_transition_matrix(spec)?;
    let i = k.index_of(start).ok_or_else(|| Error::Domain(format!("{start:?} is not a state")))?;
    let pi = k.states().iter().map(|x| spec.stationary_pmf(x)).collect::<Result<Vec<_>>>()?;
    let mut mu = vec![ExactScalar::zero(); k.len()];
    mu[i] = ExactScalar::one();
    let mut out = Vec::with_capacity(l_max as usize + 1);
    for l in 0..=l_max {
        if l > 0 {
            mu = k.left_apply(&mu);
        }
        let chi: ExactScalar = mu.iter().zip(&pi).map(|(a, b)| (a - b) * (a - b) / b).sum();
        let tv: ExactScalar = mu.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum::<ExactScalar>() / ExactScalar::from_integer(2.into());
        out.push((chi, tv));
    }
    Ok(out)
}

/// `sqrt(chi^2) / 2`
pub fn tv_upper(chisq: f64) -> f64 {
    chisq.sqrt() / 2.0
}

#[derive(Clone, Debug, Serialize)]
pub struct ChiSquareCurve {
    pub spec: ChainSpec,
    pub start: Vec<u64>,
    /// `(l, chi^2)` for `l = 0..=l_max`
    pub points: Vec<(u64, f64)>,
}

pub fn chisq_curve(spec: &ChainSpec, start: &[u64], l_max: u64) -> Result<ChiSquareCurve> {
    let sum = SpectralSum::new(spec, start)?;
    let points = (0..=l_max).into_par_iter().map(|l| (l, sum.eval(l))).collect();
    Ok(ChiSquareCurve { spec: spec.clone(), start: start.to_vec(), points })
}

/// Smallest `l` with `chi^2(l) <= eps`, by doubling then bisection.
pub fn steps_to_epsilon(spec: &ChainSpec, start: &[u64], eps: f64) -> Result<u64> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    let sum = SpectralSum::new(spec, start)?;
    let target = eps.ln();
    let ok = |l: u64| sum.ln_eval(l) <= target;
    if ok(0) {
        return Ok(0);
    }
    let mut hi = 1u64;
    while !ok(hi) {
        if hi >= 1 << 62 {
            return Err(Error::Domain("chain does not reach eps (unit eigenvalue beyond degree 0?)".into()));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Chi-square distance of the reversible Gaussian AR chain after `l` steps from `x`.
pub fn chisq_normal_ar(a: &DMatrix<f64>, sigma: &DMatrix<f64>, x: &DVector<f64>, l: u64) -> Result<f64> {
    normal_ar_spectrum(a, sigma)?.chisq(x, l)
}

/// Which closed-form proposition a bound comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundFamily {
    Moran,
    Hubbell,
    Gibbs,
    BernoulliLaplaceDownUp,
    Ehrenfest,
    NormalAr,
}

/// Step thresholds `D + c R` (upper) and `D - c R` (lower) with the chi-square
/// levels each guarantees.
#[derive(Clone, Debug, Serialize)]
pub struct MixingBound {
    pub family: BoundFamily,
    pub c: f64,
    /// For `l >= upper`, `chi^2(l) <= upper_level`.
    pub upper: f64,
    pub upper_level: f64,
    /// For `l <= lower`, `chi^2(l) >= lower_level`.
    pub lower: f64,
    pub lower_level: f64,
    /// Whether `c` lies in the range where the upper statement is proved.
    pub upper_applies: bool,
    /// Rate `R`: the step count per unit of `c`.
    pub rate: f64,
    /// Large-`N` form of the `c = 0` threshold, as the remarks state it.
    pub asymptotic: Option<f64>,
}

fn ln(x: f64) -> f64 {
    x.ln()
}

/// Thresholds for start `N e_i` (discrete families).
pub fn mixing_bounds(spec: &ChainSpec, color: usize, c: f64) -> Result<MixingBound> {
    spec.validate()?;
    if color >= spec.dim() {
        return Err(Error::InvalidParameter(format!("color {color} out of range")));
    }
    let pop = spec.population() as f64;
    let rational = |r: &ExactScalar| ratio_to_f64(r);
    // (U, L, U_inf, one - beta_1 exactly, levels, gibbs offset)
    let (family, upper_log, lower_log, upper_log_inf, gap, upper_level, lower_level, offset) = match spec {
        ChainSpec::Moran { .. } | ChainSpec::Hubbell { .. } | ChainSpec::GibbsDm { .. } => {
            let alpha = spec.dm_alpha().expect("Dirichlet-multinomial family");
            let abs_exact: ExactScalar = alpha.iter().sum();
            let a_i = rational(&alpha[color]);
            let abs = rational(&abs_exact);
            let odds = (abs - a_i) / a_i;
            let lead = 3.0 * abs.max(2.0);
            let beta1: ExactScalar = eigenvalue(spec, 1)?;
            let gap = ExactScalar::one() - beta1;
            let (family, shrink, offset) = match spec {
                ChainSpec::Moran { .. } => (BoundFamily::Moran, pop / (pop + abs), 0.0),
                ChainSpec::Hubbell { .. } => (BoundFamily::Hubbell, pop / (pop + abs), 0.0),
                _ => (BoundFamily::Gibbs, 1.0, -0.5),
            };
            (
                family,
                ln(lead * shrink * odds.max(1.0)),
                ln(lead * shrink * odds),
                ln(lead * odds.max(1.0)),
                gap,
                (-c).exp(),
                c.exp() / 6.0,
                offset,
            )
        }
        ChainSpec::BlDownUp { caps, n, .. } => {
            if caps[color] < *n {
                return Err(Error::Domain(format!("the bound needs N <= l_{}", color + 1)));
            }
            let total = caps.iter().sum::<u64>() as f64;
            let li = caps[color] as f64;
            let u = ln(total * pop * (total - li) / ((total - pop) * li));
            let beta1: ExactScalar = eigenvalue(spec, 1)?;
            (BoundFamily::BernoulliLaplaceDownUp, u, u, u, ExactScalar::one() - beta1, 2.0 * (-c).exp(), c.exp() / 2.0, 0.0)
        }
        ChainSpec::Ehrenfest { p, s, n } => {
            let p_i = rational(&p[color]);
            let u = ln(pop * (1.0 - p_i) / p_i);
            let gap = ExactScalar::new((*s).into(), (*n).into());
            (BoundFamily::Ehrenfest, u, u, u, gap, (-c).exp().exp() - 1.0, c.exp(), 0.0)
        }
        _ => return Err(Error::Unsupported(format!("no closed-form bound for the {} chain", spec.name()))),
    };
    let ln_beta1 = ln_abs_ratio(&(ExactScalar::one() - &gap));
    let gap = rational(&gap);
    let (upper, lower, rate) = if ln_beta1 == f64::NEG_INFINITY {
        // one step reaches stationarity
        (1.0, 0.0, 0.0)
    } else {
        let den = -2.0 * ln_beta1;
        ((upper_log + c) / den + offset, (lower_log - c) / den + offset, 1.0 / den)
    };
    Ok(MixingBound {
        family,
        c,
        upper,
        upper_level,
        lower,
        lower_level,
        upper_applies: c > 0.0,
        rate,
        asymptotic: (gap > 0.0).then(|| upper_log_inf / (2.0 * gap)),
    })
}

/// Prop.-style thresholds for the Gaussian AR chain started at 0.
pub fn mixing_bounds_normal_ar(a: &DMatrix<f64>, sigma: &DMatrix<f64>, c: f64) -> Result<MixingBound> {
    let spec = normal_ar_spectrum(a, sigma)?;
    let d = spec.lambdas.len() as f64;
    let lam = spec.lambdas[0].abs();
    let (upper, lower, rate) = if lam == 0.0 {
        (1.0, 0.0, 0.0)
    } else {
        let den = -4.0 * lam.ln();
        ((2f64.ln() + c) / den, (2f64.ln() - c) / den, 1.0 / den)
    };
    Ok(MixingBound {
        family: BoundFamily::NormalAr,
        c,
        upper,
        upper_level: 10.0 * (-c).exp(),
        lower,
        lower_level: c.exp() / 4.0,
        upper_applies: c >= (d / 2.0).ln(),
        rate,
        asymptotic: None,
    })
}
