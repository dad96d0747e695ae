use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Max-norm tolerance of the matrix identity checks.
pub const CHECK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct NormalArCheck {
    pub stationary: bool,
    pub reversible: bool,
    pub spectral_radius_ok: bool,
    pub spectral_radius: f64,
}

impl NormalArCheck {
    pub fn passes(&self) -> bool {
        self.stationary && self.reversible && self.spectral_radius_ok
    }
}

/// `V = Sigma - A Sigma A^T`, the only noise covariance that keeps `N(0, Sigma)` invariant.
pub fn noise_covariance(a: &DMatrix<f64>, sigma: &DMatrix<f64>) -> DMatrix<f64> {
    sigma - a * sigma * a.transpose()
}

pub fn normal_ar_check(a: &DMatrix<f64>, sigma: &DMatrix<f64>, v: &DMatrix<f64>) -> NormalArCheck {
    let stationary = (v - noise_covariance(a, sigma)).amax() <= CHECK_TOL;
    let reversible = (a * sigma - sigma * a.transpose()).amax() <= CHECK_TOL;
    let spectral_radius = spectral_radius(a);
    NormalArCheck { stationary, reversible, spectral_radius_ok: spectral_radius < 1.0, spectral_radius }
}

/// Largest eigenvalue modulus, from a real Schur form; falls back to
/// Gelfand's formula on repeated squaring if the iteration stalls.
pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    if let Some(schur) = nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, 10_000) {
        return schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    let mut m = a.clone();
    let mut log_scale = 0.0;
    let mut k = 1.0;
    for _ in 0..40 {
        let norm = m.norm();
        if norm == 0.0 {
            return 0.0;
        }
        m /= norm;
        log_scale += norm.ln() / k;
        m = &m * &m;
        k *= 2.0;
    }
    (log_scale + m.norm().ln() / k).exp()
}

/// Posterior precision and the symmetric-sweep Gibbs update of the image model.
#[derive(Clone, Debug)]
pub struct ImageModel {
    pub q: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub v: DMatrix<f64>,
}

impl ImageModel {
    /// Stationary covariance `Q^{-1}`.
    pub fn sigma(&self) -> Result<DMatrix<f64>> {
        self.q
            .clone()
            .cholesky()
            .map(|c| c.inverse())
            .ok_or_else(|| Error::LinearAlgebra("precision matrix is not positive definite".into()))
    }
}

fn invert(m: DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    m.try_inverse().ok_or_else(|| Error::LinearAlgebra(format!("{what} is singular")))
}

/// Gaussian image prior on a `rows x cols` 4-neighbor lattice (no wraparound)
/// with pixel noise `sigma`, and the forward-then-backward Gibbs sweep.
pub fn image_gibbs_model(delta: f64, sigma: f64, rows: usize, cols: usize) -> Result<ImageModel> {
    if delta.is_nan() || delta < 0.0 || sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::InvalidParameter("need delta >= 0 and sigma > 0".into()));
    }
    let n = rows * cols;
    let mut q = DMatrix::zeros(n, n);
    let idx = |r: usize, c: usize| r * cols + c;
    for r in 0..rows {
        for c in 0..cols {
            let i = idx(r, c);
            let mut neighbors = Vec::with_capacity(4);
            if r > 0 {
                neighbors.push(idx(r - 1, c));
            }
            if r + 1 < rows {
                neighbors.push(idx(r + 1, c));
            }
            if c > 0 {
                neighbors.push(idx(r, c - 1));
            }
            if c + 1 < cols {
                neighbors.push(idx(r, c + 1));
            }
            q[(i, i)] = 2.0 * delta * neighbors.len() as f64 + 1.0 / (sigma * sigma);
            for j in neighbors {
                q[(i, j)] = -2.0 * delta;
            }
        }
    }
    let d = DMatrix::from_diagonal(&q.diagonal());
    let l = q.clone().lower_triangle() - &d;
    let upper_inv = invert(&d + l.transpose(), "D + L^T")?;
    let lower_inv = invert(&d + &l, "D + L")?;
    let w = &upper_inv * &l * &lower_inv;
    let a = &w * l.transpose();
    let v = &w * &d * w.transpose() + &upper_inv * &d * &lower_inv;
    Ok(ImageModel { q, a, v })
}
