//! Exact oracle checks driven from a chain specification.

use serde::Serialize;

use crate::chains::{build_transition_matrix, ChainSpec, MATRIX_STATE_CAP};
use crate::error::{Error, Result};
use crate::numerics::{format_ratio, ExactScalar, Field};
use crate::orthopoly::MultiIndex;
use crate::spectra::{max_degree, verify_eigenfunctions_with, SpectralTerm};

/// Largest state space the Gram and kernel checks walk (quadratic cost).
pub const VERIFY_STATES: u64 = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    Orthogonality,
    Eigenfunctions,
    Kernels,
    Balance,
}

impl Scope {
    pub const ALL: [Scope; 4] = [Scope::Orthogonality, Scope::Eigenfunctions, Scope::Kernels, Scope::Balance];

    pub fn name(&self) -> &'static str {
        match self {
            Scope::Orthogonality => "orthogonality",
            Scope::Eigenfunctions => "eigenfunctions",
            Scope::Kernels => "kernels",
            Scope::Balance => "balance",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub scope: Scope,
    pub chain: String,
    pub passed: bool,
    pub checked: u64,
    /// First counterexample, if any.
    pub failure: Option<String>,
}

fn states(spec: &ChainSpec) -> Result<Vec<Vec<u64>>> {
    spec.states(VERIFY_STATES)
}

/// Gram matrix of the chain's polynomial basis under its stationary law.
pub fn check_orthogonality(spec: &ChainSpec) -> Result<CheckResult> {
    let family = spec.polynomial_family();
    let xs = states(spec)?;
    let pop = spec.population();
    let weights = xs.iter().map(|x| spec.stationary_pmf(x)).collect::<Result<Vec<_>>>()?;
    let idx: Vec<MultiIndex> = (0..=max_degree(spec)).flat_map(|k| family.indices(k, spec.dim(), pop)).collect();
    let mut failure = None;
    if idx.len() != xs.len() {
        failure = Some(format!("{} basis functions for {} states", idx.len(), xs.len()));
    }
    let vals = idx
        .iter()
        .map(|n| xs.iter().map(|x| family.eval_exact(n, x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let mut checked = 0;
    'outer: for (i, n) in idx.iter().enumerate() {
        for (k, m) in idx.iter().enumerate().skip(i) {
            checked += 1;
            let s: ExactScalar = (0..xs.len()).map(|t| &vals[i][t] * &vals[k][t] * &weights[t]).sum();
            let want = if i == k {
                family.norm2_exact(n, pop).ok_or_else(|| Error::Domain(format!("no norm for {n:?}")))?
            } else {
                ExactScalar::zero()
            };
            if s != want {
                failure = Some(format!("<Q{:?}, Q{:?}> = {} (want {})", n.entries(), m.entries(), format_ratio(&s), format_ratio(&want)));
                break 'outer;
            }
        }
    }
    Ok(CheckResult { scope: Scope::Orthogonality, chain: spec.name().into(), passed: failure.is_none(), checked, failure })
}

/// Kernel equals the basis bilinear sum, and `sum_n h_n(x, y) m(y) = delta_xy`.
pub fn check_kernels(spec: &ChainSpec) -> Result<CheckResult> {
    let kernel = spec.kernel_family()?;
    let family = spec.polynomial_family();
    let xs = states(spec)?;
    let pop = spec.population();
    let max = max_degree(spec);
    let mut checked = 0;
    let mut failure = None;
    let bases: Vec<Vec<MultiIndex>> = (0..=max).map(|k| family.indices(k, spec.dim(), pop)).collect();
    'outer: for x in &xs {
        for y in &xs {
            let mut total = ExactScalar::zero();
            for (n, basis) in bases.iter().enumerate() {
                let h = kernel.kernel(n as u64, x, y)?;
                let mut bilinear = ExactScalar::zero();
                for idx in basis {
                    let norm = family.norm2_exact(idx, pop).ok_or_else(|| Error::Domain(format!("no norm for {idx:?}")))?;
                    bilinear += family.eval_exact(idx, x)? * family.eval_exact(idx, y)? / norm;
                }
                checked += 1;
                if h != bilinear {
                    failure = Some(format!("h_{n}({x:?}, {y:?}) = {} but the basis sum is {}", format_ratio(&h), format_ratio(&bilinear)));
                    break 'outer;
                }
                total += h;
            }
            let delta = if x == y { ExactScalar::one() } else { ExactScalar::zero() };
            if total * spec.stationary_pmf(y)? != delta {
                failure = Some(format!("reproducing identity fails at ({x:?}, {y:?})"));
                break 'outer;
            }
        }
    }
    Ok(CheckResult { scope: Scope::Kernels, chain: spec.name().into(), passed: failure.is_none(), checked, failure })
}

/// Exact row sums, detailed balance and stationarity of the transition matrix.
pub fn check_balance(spec: &ChainSpec) -> Result<CheckResult> {
    let k = build_transition_matrix(spec)?;
    let pi = k.states().iter().map(|x| spec.stationary_pmf(x)).collect::<Result<Vec<_>>>()?;
    let mut failure = None;
    let mut checked = 0;
    'outer: for i in 0..k.len() {
        let sum: ExactScalar = k.row(i).iter().map(|(_, v)| v.clone()).sum();
        if sum != ExactScalar::one() {
            failure = Some(format!("row {:?} sums to {}", k.states()[i], format_ratio(&sum)));
            break;
        }
        for (j, v) in k.row(i) {
            checked += 1;
            if &pi[i] * v != &pi[*j] * k.entry(*j, i) {
                failure = Some(format!("m(x)K(x,y) != m(y)K(y,x) at x={:?}, y={:?}", k.states()[i], k.states()[*j]));
                break 'outer;
            }
        }
    }
    if failure.is_none() && k.left_apply(&pi) != pi {
        failure = Some("m K != m".into());
    }
    Ok(CheckResult { scope: Scope::Balance, chain: spec.name().into(), passed: failure.is_none(), checked, failure })
}

/// Eigenfunction residuals and the eigenvalue multiset, optionally against
/// substituted spectral terms.
pub fn check_eigenfunctions(spec: &ChainSpec, terms: Option<&[SpectralTerm]>) -> Result<CheckResult> {
    let owned;
    let terms = match terms {
        Some(t) => t,
        None => {
            owned = crate::spectra::eigenvalues(spec)?;
            &owned
        }
    };
    let report = verify_eigenfunctions_with(spec, max_degree(spec), terms)?;
    Ok(CheckResult {
        scope: Scope::Eigenfunctions,
        chain: spec.name().into(),
        passed: report.passes(),
        checked: report.residuals.len() as u64,
        failure: match report.first_failure() {
            Some(r) => Some(format!(
                "K q_{:?} != {} q: residual {}",
                r.index.entries(),
                format_ratio(&r.eigenvalue),
                format_ratio(&r.residual)
            )),
            None if !report.multiset_ok() => Some(format!("eigenvalue multiset differs (gap {:.3e})", report.multiset_gap)),
            None => None,
        },
    })
}

pub fn check(spec: &ChainSpec, scope: Scope) -> Result<CheckResult> {
    spec.validate()?;
    if !spec.is_finite() {
        return Err(Error::Unsupported("exact checks need a finite chain".into()));
    }
    match scope {
        Scope::Orthogonality => check_orthogonality(spec),
        Scope::Eigenfunctions => check_eigenfunctions(spec, None),
        Scope::Kernels => check_kernels(spec),
        Scope::Balance => {
            let count = spec.state_count()?;
            if count > MATRIX_STATE_CAP.into() {
                return Err(Error::capacity("transition matrix", count, MATRIX_STATE_CAP));
            }
            check_balance(spec)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::tests::qs;

    fn specs() -> Vec<ChainSpec> {
        vec![
            ChainSpec::PolyaLevel { n: 3, alpha: qs(&["1/2", "1", "2"]), s: 2 },
            ChainSpec::GibbsDm { n: 3, alpha: qs(&["1", "1", "1"]) },
            ChainSpec::BlDownUp { caps: vec![2, 2, 2], n: 3, s: 1 },
            ChainSpec::Ehrenfest { n: 3, p: qs(&["1/5", "3/10", "1/2"]), s: 1 },
        ]
    }

    #[test]
    fn all_scopes_pass_on_small_chains() {
        for spec in specs() {
            for scope in Scope::ALL {
                let r = check(&spec, scope).unwrap();
                assert!(r.passed, "{:?}", r);
                assert!(r.checked > 0);
            }
        }
    }

    #[test]
    fn corrupted_eigenvalue_fails() {
        let spec = &specs()[0];
        let mut terms = crate::spectra::eigenvalues(spec).unwrap();
        terms[1].eigenvalue = &terms[1].eigenvalue + ExactScalar::new(1.into(), 100.into());
        let r = check_eigenfunctions(spec, Some(&terms)).unwrap();
        assert!(!r.passed);
        assert!(r.failure.is_some());
    }
}
