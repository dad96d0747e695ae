//! Closed-form spectra, eigenfunction verification against the matrix
//! oracle, and the diagonalizing transform of the Gaussian AR process.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigUint;
use num_traits::Signed;

use crate::chains::{build_transition_matrix, ChainSpec, TransitionMatrix, CHECK_TOL};
use crate::error::{Error, Result};
use crate::numerics::{
    binomial, biguint_to_ratio, count_bounded_compositions, falling_factorial, int, ratio_to_f64, rising_factorial,
    ExactScalar, Field,
};
use crate::orthopoly::MultiIndex;

/// Largest state space accepted by [`verify_eigenfunctions`].
pub const VERIFY_STATE_CAP: usize = 2_000;

/// Largest state space for the exact power-sum comparison of eigenvalue multisets.
pub const EXACT_MULTISET_CAP: usize = 35;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralTerm {
    pub degree: u64,
    pub eigenvalue: ExactScalar,
    pub multiplicity: BigUint,
}

fn choose<T: Field>(n: u64, k: u64) -> T {
    T::from_ratio(&biguint_to_ratio(&binomial(n, k)))
}

/// Pólya level eigenvalue, summed as printed first:
/// `sum_k C(n,k) (N-s)_[k] s_[n-k] / (N_[k] (N+A)_(n-k))`.
///
/// With `A = -|l|` this is the Bernoulli–Laplace level eigenvalue.
pub fn polya_level_beta<T: Field>(n: u64, pop: u64, s: u64, abs_alpha: &T) -> T {
    let big_n = int::<T>(pop as i64);
    let rest = int::<T>(pop as i64 - s as i64);
    let s_t = int::<T>(s as i64);
    let mut acc = T::zero();
    for k in 0..=n {
        let num = choose::<T>(n, k) * falling_factorial(&rest, k) * falling_factorial(&s_t, n - k);
        if num.is_zero() {
            continue;
        }
        let den = falling_factorial(&big_n, k) * rising_factorial(&(big_n.clone() + abs_alpha.clone()), n - k);
        acc = acc + num / den;
    }
    acc
}

/// The same sum with the summation index reversed, as in the second display.
pub fn polya_level_beta_reindexed<T: Field>(n: u64, pop: u64, s: u64, abs_alpha: &T) -> T {
    let big_n = int::<T>(pop as i64);
    let rest = int::<T>(pop as i64 - s as i64);
    let s_t = int::<T>(s as i64);
    let mut acc = T::zero();
    for k in 0..=n {
        let num = choose::<T>(n, k) * falling_factorial(&rest, n - k) * falling_factorial(&s_t, k);
        if num.is_zero() {
            continue;
        }
        let den = falling_factorial(&big_n, n - k) * rising_factorial(&(big_n.clone() + abs_alpha.clone()), k);
        acc = acc + num / den;
    }
    acc
}

/// `(N-s)_[n] (N+A)_(n) / (N_[n] (N-s+A)_(n))`.
pub fn polya_down_up_beta<T: Field>(n: u64, pop: u64, s: u64, abs_alpha: &T) -> T {
    let big_n = int::<T>(pop as i64);
    let rest = int::<T>(pop as i64 - s as i64);
    let num = falling_factorial(&rest, n) * rising_factorial(&(big_n.clone() + abs_alpha.clone()), n);
    if num.is_zero() {
        return T::zero();
    }
    num / (falling_factorial(&big_n, n) * rising_factorial(&(rest + abs_alpha.clone()), n))
}

/// `N_[n] (N+s+A)_(n) / ((N+s)_[n] (N+A)_(n))`.
pub fn polya_up_down_beta<T: Field>(n: u64, pop: u64, s: u64, abs_alpha: &T) -> T {
    let big_n = int::<T>(pop as i64);
    let grown = int::<T>((pop + s) as i64);
    let num = falling_factorial(&big_n, n) * rising_factorial(&(grown.clone() + abs_alpha.clone()), n);
    if num.is_zero() {
        return T::zero();
    }
    num / (falling_factorial(&grown, n) * rising_factorial(&(big_n + abs_alpha.clone()), n))
}

/// `1 - n(A+n-1) / (N(N+A))`.
pub fn moran_beta<T: Field>(n: u64, pop: u64, abs_alpha: &T) -> T {
    let n_t = int::<T>(n as i64);
    let big_n = int::<T>(pop as i64);
    T::one()
        - n_t.clone() * (abs_alpha.clone() + n_t - T::one()) / (big_n.clone() * (big_n + abs_alpha.clone()))
}

/// `1 - n(n+A-1) / (N(N+A-1))`.
pub fn hubbell_beta<T: Field>(n: u64, pop: u64, abs_alpha: &T) -> T {
    let n_t = int::<T>(n as i64);
    let big_n = int::<T>(pop as i64);
    T::one()
        - n_t.clone() * (n_t + abs_alpha.clone() - T::one())
            / (big_n.clone() * (big_n + abs_alpha.clone() - T::one()))
}

/// `N_[n] / (N+A)_(n)`.
pub fn gibbs_beta<T: Field>(n: u64, pop: u64, abs_alpha: &T) -> T {
    let big_n = int::<T>(pop as i64);
    falling_factorial(&big_n, n) / rising_factorial(&(big_n + abs_alpha.clone()), n)
}

/// `(N-s)_[n] (L-N)_[n] / (N_[n] (L-N+s)_[n])`.
pub fn bl_down_up_beta<T: Field>(n: u64, pop: u64, s: u64, abs_l: u64) -> T {
    let num = falling_factorial(&int::<T>(pop as i64 - s as i64), n)
        * falling_factorial(&int::<T>(abs_l as i64 - pop as i64), n);
    if num.is_zero() {
        return T::zero();
    }
    num / (falling_factorial(&int::<T>(pop as i64), n) * falling_factorial(&int::<T>((abs_l - pop + s) as i64), n))
}

/// `N_[n] (L-N-s)_[n] / ((N+s)_[n] (L-N)_[n])`.
pub fn bl_up_down_beta<T: Field>(n: u64, pop: u64, s: u64, abs_l: u64) -> T {
    let num = falling_factorial(&int::<T>(pop as i64), n)
        * falling_factorial(&int::<T>(abs_l as i64 - pop as i64 - s as i64), n);
    if num.is_zero() {
        return T::zero();
    }
    num / (falling_factorial(&int::<T>((pop + s) as i64), n) * falling_factorial(&int::<T>((abs_l - pop) as i64), n))
}

/// `(N-s)_[n] / N_[n]`.
pub fn ehrenfest_beta<T: Field>(n: u64, pop: u64, s: u64) -> T {
    let num = falling_factorial(&int::<T>(pop as i64 - s as i64), n);
    if num.is_zero() {
        return T::zero();
    }
    num / falling_factorial(&int::<T>(pop as i64), n)
}

fn abs_alpha_of(spec: &ChainSpec) -> Option<ExactScalar> {
    spec.dm_alpha().map(|a| a.iter().sum())
}

/// `beta_n` for a finite family, in any scalar regime.
pub fn eigenvalue<T: Field>(spec: &ChainSpec, n: u64) -> Result<T> {
    let pop = spec.population();
    if n > pop {
        return Err(Error::Domain(format!("degree {n} exceeds N = {pop}")));
    }
    let abs_alpha = abs_alpha_of(spec).map(|a| T::from_ratio(&a));
    beta_given(spec, n, abs_alpha.as_ref())
}

/// `beta_1, ..., beta_max`, with the stationary parameters summed once.
pub fn eigenvalue_ladder<T: Field>(spec: &ChainSpec, max: u64) -> Result<Vec<T>> {
    let pop = spec.population();
    if max > pop {
        return Err(Error::Domain(format!("degree {max} exceeds N = {pop}")));
    }
    let abs_alpha = abs_alpha_of(spec).map(|a| T::from_ratio(&a));
    (1..=max).map(|n| beta_given(spec, n, abs_alpha.as_ref())).collect()
}

fn beta_given<T: Field>(spec: &ChainSpec, n: u64, abs_alpha: Option<&T>) -> Result<T> {
    let pop = spec.population();
    let abs_l: u64 = spec.caps().map_or(0, |c| c.iter().sum());
    Ok(match spec {
        ChainSpec::PolyaLevel { s, .. } => polya_level_beta(n, pop, *s, abs_alpha.unwrap()),
        ChainSpec::PolyaDownUp { s, .. } => polya_down_up_beta(n, pop, *s, abs_alpha.unwrap()),
        ChainSpec::PolyaUpDown { s, .. } => polya_up_down_beta(n, pop, *s, abs_alpha.unwrap()),
        ChainSpec::Moran { .. } => moran_beta(n, pop, abs_alpha.unwrap()),
        ChainSpec::Hubbell { .. } => hubbell_beta(n, pop, abs_alpha.unwrap()),
        ChainSpec::GibbsDm { .. } => gibbs_beta(n, pop, abs_alpha.unwrap()),
        ChainSpec::BlLevel { s, .. } => polya_level_beta(n, pop, *s, &int::<T>(-(abs_l as i64))),
        ChainSpec::BlDownUp { s, .. } => bl_down_up_beta(n, pop, *s, abs_l),
        ChainSpec::BlUpDown { s, .. } => bl_up_down_beta(n, pop, *s, abs_l),
        ChainSpec::Ehrenfest { s, .. } => ehrenfest_beta(n, pop, *s),
        ChainSpec::NormalAr { .. } => return Err(Error::Unsupported("use normal_ar_spectrum".into())),
    })
}

/// Largest degree carrying eigenfunctions: `N`, or `min(N, |l| - N)` for the
/// hypergeometric families.
pub fn max_degree(spec: &ChainSpec) -> u64 {
    match spec.caps() {
        Some(caps) => spec.population().min(caps.iter().sum::<u64>() - spec.population()),
        None => spec.population(),
    }
}

/// Number of eigenfunctions of exact degree `n`.
pub fn multiplicity(spec: &ChainSpec, n: u64) -> BigUint {
    if n > max_degree(spec) {
        return BigUint::ZERO;
    }
    match spec.caps() {
        Some(caps) => {
            let upto = count_bounded_compositions(n, caps);
            if n == 0 {
                upto
            } else {
                upto - count_bounded_compositions(n - 1, caps)
            }
        }
        None => {
            let d = spec.dim() as u64;
            if d == 1 {
                return if n == 0 { BigUint::from(1u32) } else { BigUint::ZERO };
            }
            binomial(d + n - 2, n)
        }
    }
}

/// Every eigenvalue with its multiplicity, degree 0 first.
pub fn eigenvalues(spec: &ChainSpec) -> Result<Vec<SpectralTerm>> {
    spec.validate()?;
    if !spec.is_finite() {
        return Err(Error::Unsupported("use normal_ar_spectrum for the AR process".into()));
    }
    let mut out = Vec::new();
    for n in 0..=max_degree(spec) {
        let multiplicity = multiplicity(spec, n);
        if multiplicity == BigUint::ZERO {
            continue;
        }
        out.push(SpectralTerm { degree: n, eigenvalue: eigenvalue(spec, n)?, multiplicity });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct IndexResidual {
    pub index: MultiIndex,
    pub eigenvalue: ExactScalar,
    /// `max_x |(K q)(x) - beta q(x)|`
    pub residual: ExactScalar,
}

#[derive(Clone, Debug)]
pub struct EigenReport {
    pub states: usize,
    pub residuals: Vec<IndexResidual>,
    /// Largest gap between the sorted formula multiset and the numerical spectrum.
    pub multiset_gap: f64,
    /// Power sums `tr K^k` against `sum mult * beta^k` for every `k`, when the
    /// state space is small enough.
    pub exact_multiset: Option<bool>,
}

impl EigenReport {
    pub fn max_residual(&self) -> ExactScalar {
        self.residuals.iter().map(|r| r.residual.clone()).max().unwrap_or_else(ExactScalar::zero)
    }

    pub fn residuals_vanish(&self) -> bool {
        self.residuals.iter().all(|r| r.residual.is_zero())
    }

    pub fn multiset_ok(&self) -> bool {
        self.multiset_gap <= 1e-10 && self.exact_multiset != Some(false)
    }

    pub fn passes(&self) -> bool {
        self.residuals_vanish() && self.multiset_ok()
    }

    pub fn first_failure(&self) -> Option<&IndexResidual> {
        self.residuals.iter().find(|r| !r.residual.is_zero())
    }
}

/// Exact check that every basis polynomial of degree at most `max_n` is an
/// eigenfunction with the closed-form eigenvalue, plus a spectrum comparison.
pub fn verify_eigenfunctions(spec: &ChainSpec, max_n: u64) -> Result<EigenReport> {
    let terms = eigenvalues(spec)?;
    verify_eigenfunctions_with(spec, max_n, &terms)
}

/// As [`verify_eigenfunctions`], against a caller-supplied spectrum.
pub fn verify_eigenfunctions_with(spec: &ChainSpec, max_n: u64, terms: &[SpectralTerm]) -> Result<EigenReport> {
    spec.validate()?;
    let count = spec.state_count()?;
    if count > BigUint::from(VERIFY_STATE_CAP) {
        return Err(Error::capacity("eigenfunction verification", count, VERIFY_STATE_CAP as u64));
    }
    let k = build_transition_matrix(spec)?;
    let family = spec.polynomial_family();
    let pop = spec.population();
    let mut residuals = Vec::new();
    for term in terms.iter().filter(|t| t.degree <= max_n) {
        for index in family.indices(term.degree, spec.dim(), pop) {
            let q = k.states().iter().map(|x| family.eval_exact(&index, x)).collect::<Result<Vec<_>>>()?;
            let kq = k.apply(&q);
            let residual = kq
                .iter()
                .zip(&q)
                .map(|(a, b)| (a - &term.eigenvalue * b).abs())
                .max()
                .unwrap_or_else(ExactScalar::zero);
            residuals.push(IndexResidual { index, eigenvalue: term.eigenvalue.clone(), residual });
        }
    }
    let pi = k.states().iter().map(|x| spec.stationary_pmf(x)).collect::<Result<Vec<_>>>()?;
    let multiset_gap = numeric_multiset_gap(&k, &pi, terms);
    let exact_multiset = (k.len() <= EXACT_MULTISET_CAP).then(|| power_sums_agree(&k, terms));
    Ok(EigenReport { states: k.len(), residuals, multiset_gap, exact_multiset })
}

fn expanded(terms: &[SpectralTerm]) -> Vec<ExactScalar> {
    let mut out = Vec::new();
    for t in terms {
        let m = crate::numerics::biguint_to_u64(&t.multiplicity).expect("multiplicity fits in memory");
        out.extend(std::iter::repeat_n(t.eigenvalue.clone(), m as usize));
    }
    out
}

fn numeric_multiset_gap(k: &TransitionMatrix, pi: &[ExactScalar], terms: &[SpectralTerm]) -> f64 {
    // reversible: pi^{1/2} K pi^{-1/2} is symmetric
    let root: Vec<f64> = pi.iter().map(|p| ratio_to_f64(p).sqrt()).collect();
    let dense = k.to_dense();
    let n = k.len();
    let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (root[i] * dense[(i, j)] / root[j] + root[j] * dense[(j, i)] / root[i]));
    let mut numeric: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    let mut formula: Vec<f64> = expanded(terms).iter().map(ratio_to_f64).collect();
    if formula.len() != numeric.len() {
        return f64::INFINITY;
    }
    numeric.sort_by(f64::total_cmp);
    formula.sort_by(f64::total_cmp);
    numeric.iter().zip(&formula).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Newton's identities: equal power sums `p_1..p_n` force equal multisets.
fn power_sums_agree(k: &TransitionMatrix, terms: &[SpectralTerm]) -> bool {
    let betas = expanded(terms);
    let n = k.len();
    if betas.len() != n {
        return false;
    }
    let mut power: Vec<Vec<ExactScalar>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { ExactScalar::one() } else { ExactScalar::zero() }).collect()).collect();
    let mut beta_pow: Vec<ExactScalar> = vec![ExactScalar::one(); n];
    for _ in 1..=n {
        // power <- power * K, using the sparse rows of K
        power = power
            .iter()
            .map(|row| {
                let mut next = vec![ExactScalar::zero(); n];
                for (i, v) in row.iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    for (j, kij) in k.row(i) {
                        next[*j] += v * kij;
                    }
                }
                next
            })
            .collect();
        let trace: ExactScalar = (0..n).map(|i| power[i][i].clone()).sum();
        for (bp, b) in beta_pow.iter_mut().zip(&betas) {
            *bp *= b;
        }
        let sum: ExactScalar = beta_pow.iter().sum();
        if trace != sum {
            return false;
        }
    }
    true
}

/// Diagonalization of a reversible Gaussian AR process.
#[derive(Clone, Debug)]
pub struct NormalArSpectrum {
    /// Eigenvalues of `A`, largest modulus first.
    pub lambdas: Vec<f64>,
    /// Orthogonal `P` with `Sigma^{-1/2} A Sigma^{1/2} = P diag(lambda) P^T`.
    pub transform: DMatrix<f64>,
    /// `Sigma^{1/2}`
    pub root: DMatrix<f64>,
    pub root_inv: DMatrix<f64>,
}

impl NormalArSpectrum {
    /// `z = P^T Sigma^{-1/2} x`
    pub fn to_independent(&self, x: &DVector<f64>) -> DVector<f64> {
        self.transform.transpose() * (&self.root_inv * x)
    }

    /// Chi-square distance after `l >= 1` steps from `x`: product of the
    /// independent AR(1) components' distances.
    pub fn chisq(&self, x: &DVector<f64>, l: u64) -> Result<f64> {
        if l == 0 {
            return Err(Error::InvalidParameter("the AR chi-square needs l >= 1".into()));
        }
        let z = self.to_independent(x);
        let mut exponent = 0.0;
        let mut log_det = 0.0;
        for (zi, lam) in z.iter().zip(&self.lambdas) {
            let p2 = lam.abs().powf(2.0 * l as f64);
            exponent += zi * zi * p2 / (1.0 + p2);
            log_det += (-(p2 * p2)).ln_1p();
        }
        if exponent > 700.0 {
            return Ok(f64::INFINITY);
        }
        Ok((exponent - 0.5 * log_det).exp_m1())
    }

    /// `prod lambda_i^{n_i}` for a multi-index over all `d` coordinates.
    pub fn product_eigenvalue(&self, n: &[u64]) -> f64 {
        self.lambdas.iter().zip(n).map(|(l, &k)| l.powi(k as i32)).product()
    }
}

pub fn normal_ar_spectrum(a: &DMatrix<f64>, sigma: &DMatrix<f64>) -> Result<NormalArSpectrum> {
    let spec = ChainSpec::NormalAr { a: a.clone(), sigma: sigma.clone() };
    spec.validate()?;
    if (a * sigma - sigma * a.transpose()).amax() > CHECK_TOL {
        return Err(Error::LinearAlgebra("A Sigma != Sigma A^T: the chain is not reversible".into()));
    }
    let eig = ((sigma + sigma.transpose()) * 0.5).symmetric_eigen();
    let sqrt = eig.eigenvalues.map(f64::sqrt);
    let inv_sqrt = eig.eigenvalues.map(|v| 1.0 / v.sqrt());
    let root = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt) * eig.eigenvectors.transpose();
    let root_inv = &eig.eigenvectors * DMatrix::from_diagonal(&inv_sqrt) * eig.eigenvectors.transpose();
    let m = &root_inv * a * &root;
    let sym = (&m + m.transpose()) * 0.5;
    let inner = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..inner.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| inner.eigenvalues[j].abs().total_cmp(&inner.eigenvalues[i].abs()));
    let lambdas: Vec<f64> = order.iter().map(|&i| inner.eigenvalues[i]).collect();
    // A is similar to the symmetric matrix, so its spectral radius is |lambda_1|
    if lambdas.first().is_some_and(|l| l.abs() >= 1.0) {
        return Err(Error::Domain(format!("spectral radius {} is not below 1", lambdas[0].abs())));
    }
    let transform = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| inner.eigenvectors[(r, order[c])]);
    Ok(NormalArSpectrum { lambdas, transform, root, root_inv })
}
