//! Gauss rules from the Golub–Welsch eigenproblem.

use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights, nodes ascending.
#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

fn golub_welsch(diag: &[f64], off: &[f64], mu0: f64) -> Rule {
    let n = diag.len();
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        j[(i, i)] = diag[i];
        if i + 1 < n {
            j[(i, i + 1)] = off[i];
            j[(i + 1, i)] = off[i];
        }
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], mu0 * eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

/// Gauss–Legendre on [0, 1].
pub fn gauss_legendre_unit(n: usize) -> Rule {
    let off: Vec<f64> = (1..n).map(|k| k as f64 / ((4 * k * k - 1) as f64).sqrt()).collect();
    let rule = golub_welsch(&vec![0.0; n], &off, 2.0);
    Rule {
        nodes: rule.nodes.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        weights: rule.weights.iter().map(|w| 0.5 * w).collect(),
    }
}

/// Gauss–Hermite for the weight `exp(-y^2)` on the real line.
pub fn gauss_hermite(n: usize) -> Rule {
    let off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    golub_welsch(&vec![0.0; n], &off, std::f64::consts::PI.sqrt())
}

/// Product rule on the simplex `{z_i >= 0, sum z = 1}` in `d` coordinates,
/// mapped from the unit cube by stick breaking. Weights include the Jacobian
/// and integrate against Lebesgue measure on the first `d-1` coordinates.
pub fn simplex_rule(d: usize, per_axis: usize) -> Vec<(Vec<f64>, f64)> {
    let base = gauss_legendre_unit(per_axis);
    let dims = d - 1;
    let mut out = Vec::new();
    let mut idx = vec![0usize; dims];
    loop {
        let mut z = Vec::with_capacity(d);
        let mut rest = 1.0;
        let mut w = 1.0;
        for &k in &idx {
            let u = base.nodes[k];
            z.push(rest * u);
            w *= base.weights[k] * rest;
            rest *= 1.0 - u;
        }
        z.push(rest);
        out.push((z, w));
        let mut pos = 0;
        loop {
            if pos == dims {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < per_axis {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let r = gauss_legendre_unit(8);
        assert!((r.integrate(|x| x.powi(7)) - 0.125).abs() < 1e-14);
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hermite_moments() {
        let r = gauss_hermite(20);
        let sp = std::f64::consts::PI.sqrt();
        assert!((r.integrate(|_| 1.0) - sp).abs() < 1e-12);
        assert!((r.integrate(|y| y * y) - sp / 2.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_volume() {
        let pts = simplex_rule(3, 6);
        let vol: f64 = pts.iter().map(|p| p.1).sum();
        assert!((vol - 0.5).abs() < 1e-13);
    }
}
