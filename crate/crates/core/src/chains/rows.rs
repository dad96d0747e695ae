use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{ChainSpec, DEFAULT_STATE_CAP, MATRIX_STATE_CAP};
use crate::distributions::{dm_weight, hypergeometric_weight, multinomial_weight};
use crate::error::{Error, Result};
use crate::numerics::{biguint_to_u64, enumerate_compositions, ratio_to_f64, ExactScalar};

/// One row of a transition kernel: target state to exact probability.
pub type Row = BTreeMap<Vec<u64>, ExactScalar>;

type Outcomes = Vec<(Vec<u64>, ExactScalar)>;

fn hyper_outcomes(s: u64, caps: &[u64]) -> Outcomes {
    enumerate_compositions(s, caps.len(), Some(caps))
        .into_iter()
        .map(|y| {
            let w = hypergeometric_weight(y.counts(), s, caps);
            (y.into_counts(), w)
        })
        .collect()
}

fn dm_outcomes(s: u64, weights: &[ExactScalar]) -> Outcomes {
    enumerate_compositions(s, weights.len(), None)
        .into_iter()
        .map(|z| {
            let w = dm_weight(z.counts(), weights);
            (z.into_counts(), w)
        })
        .collect()
}

fn multinomial_outcomes(s: u64, p: &[ExactScalar]) -> Outcomes {
    enumerate_compositions(s, p.len(), None)
        .into_iter()
        .map(|z| {
            let w = multinomial_weight(z.counts(), p);
            (z.into_counts(), w)
        })
        .collect()
}

fn shift(x: &[u64], weights: &[ExactScalar]) -> Vec<ExactScalar> {
    x.iter().zip(weights).map(|(&xi, a)| a + ExactScalar::from_integer(xi.into())).collect()
}

fn sub(x: &[u64], y: &[u64]) -> Vec<u64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

fn add(x: &[u64], y: &[u64]) -> Vec<u64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn deposit(row: &mut Row, y: Vec<u64>, w: ExactScalar) {
    if w.is_zero() {
        return;
    }
    *row.entry(y).or_insert_with(ExactScalar::zero) += w;
}

/// Remove `Y` then add `Z`, where the insertion law may depend on `Y`.
fn remove_then_add(x: &[u64], removed: Outcomes, added: impl Fn(&[u64]) -> Outcomes) -> Row {
    let mut row = Row::new();
    for (y, py) in removed {
        let rest = sub(x, &y);
        for (z, pz) in added(&rest) {
            deposit(&mut row, add(&rest, &z), &py * pz);
        }
    }
    row
}

/// Add `Z` then remove `Y`, where the removal law depends on `x + Z`.
fn add_then_remove(x: &[u64], added: Outcomes, removed: impl Fn(&[u64]) -> Outcomes) -> Row {
    let mut row = Row::new();
    for (z, pz) in added {
        let grown = add(x, &z);
        for (y, py) in removed(&grown) {
            deposit(&mut row, sub(&grown, &y), &pz * py);
        }
    }
    row
}

/// Births and deaths of a single individual: `K(x, x + e_i - e_j)` from a
/// rate function, with the remainder on the diagonal.
fn single_swap_row(x: &[u64], rate: impl Fn(usize, usize) -> ExactScalar) -> Row {
    let d = x.len();
    let mut row = Row::new();
    let mut off = ExactScalar::zero();
    for j in 0..d {
        if x[j] == 0 {
            continue;
        }
        for i in (0..d).filter(|&i| i != j) {
            let w = rate(i, j);
            if w.is_zero() {
                continue;
            }
            let mut y = x.to_vec();
            y[i] += 1;
            y[j] -= 1;
            off += &w;
            deposit(&mut row, y, w);
        }
    }
    deposit(&mut row, x.to_vec(), ExactScalar::one() - off);
    row
}

fn mutation_entry(m: &ExactScalar, p: &[ExactScalar], k: usize, i: usize) -> ExactScalar {
    let stay = if k == i { ExactScalar::one() - m } else { ExactScalar::zero() };
    stay + m * &p[i]
}

/// Exact transition row from `x`, refusing state spaces above the default cap.
pub fn transition_row(spec: &ChainSpec, x: &[u64]) -> Result<Row> {
    transition_row_capped(spec, x, DEFAULT_STATE_CAP)
}

pub fn transition_row_capped(spec: &ChainSpec, x: &[u64], cap: u64) -> Result<Row> {
    spec.validate()?;
    let count = spec.state_count()?;
    if biguint_to_u64(&count).is_none_or(|c| c > cap) {
        return Err(Error::capacity("state space", count, cap));
    }
    spec.require_state(x)?;
    let big = |v: u64| ExactScalar::from_integer(v.into());
    Ok(match spec {
        ChainSpec::PolyaLevel { alpha, s, .. } => {
            let added = dm_outcomes(*s, &shift(x, alpha));
            remove_then_add(x, hyper_outcomes(*s, x), |_| added.clone())
        }
        ChainSpec::PolyaDownUp { alpha, s, .. } => {
            remove_then_add(x, hyper_outcomes(*s, x), |rest| dm_outcomes(*s, &shift(rest, alpha)))
        }
        ChainSpec::PolyaUpDown { alpha, s, .. } => {
            add_then_remove(x, dm_outcomes(*s, &shift(x, alpha)), |grown| hyper_outcomes(*s, grown))
        }
        ChainSpec::Moran { n, m, p } => {
            let nn = big(*n);
            single_swap_row(x, |i, j| {
                let birth: ExactScalar =
                    (0..x.len()).map(|k| big(x[k]) / &nn * mutation_entry(m, p, k, i)).sum();
                big(x[j]) / &nn * birth
            })
        }
        ChainSpec::Hubbell { n, m, p } => {
            let nn = big(*n);
            single_swap_row(x, |i, j| {
                let birth: ExactScalar = (0..x.len())
                    .map(|k| {
                        let parents = if k == j { x[k] - 1 } else { x[k] };
                        big(parents) * mutation_entry(m, p, k, i)
                    })
                    .sum();
                big(x[j]) / &nn * birth / big(n - 1)
            })
        }
        ChainSpec::GibbsDm { n, alpha } => {
            let weights = shift(x, alpha);
            let mut row = Row::new();
            for y in enumerate_compositions(*n, x.len(), None) {
                let w = dm_weight(y.counts(), &weights);
                deposit(&mut row, y.into_counts(), w);
            }
            row
        }
        ChainSpec::BlLevel { caps, s, .. } => {
            let right = sub(caps, x);
            let added = hyper_outcomes(*s, &right);
            remove_then_add(x, hyper_outcomes(*s, x), |_| added.clone())
        }
        ChainSpec::BlDownUp { caps, s, .. } => {
            remove_then_add(x, hyper_outcomes(*s, x), |rest| hyper_outcomes(*s, &sub(caps, rest)))
        }
        ChainSpec::BlUpDown { caps, s, .. } => {
            add_then_remove(x, hyper_outcomes(*s, &sub(caps, x)), |grown| hyper_outcomes(*s, grown))
        }
        ChainSpec::Ehrenfest { p, s, .. } => {
            let added = multinomial_outcomes(*s, p);
            remove_then_add(x, hyper_outcomes(*s, x), |_| added.clone())
        }
        ChainSpec::NormalAr { .. } => return Err(Error::Unsupported("continuous state space".into())),
    })
}

/// Sparse exact kernel over the colex-ordered state space.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    states: Vec<Vec<u64>>,
    index: HashMap<Vec<u64>, usize>,
    rows: Vec<Vec<(usize, ExactScalar)>>,
}

impl TransitionMatrix {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<u64>] {
        &self.states
    }

    pub fn index_of(&self, x: &[u64]) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn row(&self, i: usize) -> &[(usize, ExactScalar)] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> ExactScalar {
        self.rows[i].iter().find(|(k, _)| *k == j).map_or_else(ExactScalar::zero, |(_, v)| v.clone())
    }

    /// `(K f)(x) = sum_y K(x, y) f(y)`.
    pub fn apply(&self, f: &[ExactScalar]) -> Vec<ExactScalar> {
        self.rows.par_iter().map(|row| row.iter().map(|(j, k)| k * &f[*j]).sum()).collect()
    }

    /// `(mu K)(y) = sum_x mu(x) K(x, y)`.
    pub fn left_apply(&self, mu: &[ExactScalar]) -> Vec<ExactScalar> {
        let mut out = vec![ExactScalar::zero(); self.len()];
        for (i, row) in self.rows.iter().enumerate() {
            if mu[i].is_zero() {
                continue;
            }
            for (j, k) in row {
                out[*j] += &mu[i] * k;
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, k) in row {
                m[(i, *j)] = ratio_to_f64(k);
            }
        }
        m
    }
}

/// Exact kernel over the full state space (at most 5000 states), rows in parallel.
pub fn build_transition_matrix(spec: &ChainSpec) -> Result<TransitionMatrix> {
    let states = spec.states(MATRIX_STATE_CAP)?;
    let index: HashMap<Vec<u64>, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let rows = states
        .par_iter()
        .map(|x| {
            let row = transition_row_capped(spec, x, MATRIX_STATE_CAP)?;
            Ok(row.into_iter().map(|(y, p)| (index[&y], p)).collect())
        })
        .collect::<Result<Vec<Vec<(usize, ExactScalar)>>>>()?;
    Ok(TransitionMatrix { states, index, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::mutation_alpha;
    use crate::chains::tests::qs;

    fn q(s: &str) -> ExactScalar {
        qs(&[s])[0].clone()
    }

    fn every_family(n: u64) -> Vec<ChainSpec> {
        let alpha = qs(&["1/2", "1", "3/2"]);
        let p = qs(&["1/5", "3/10", "1/2"]);
        let m = q("1/7");
        let caps = vec![2, 3, 2];
        let mut specs = Vec::new();
        for s in 0..=n {
            specs.push(ChainSpec::PolyaLevel { n, alpha: alpha.clone(), s });
            specs.push(ChainSpec::PolyaDownUp { n, alpha: alpha.clone(), s });
            specs.push(ChainSpec::PolyaUpDown { n, alpha: alpha.clone(), s });
            specs.push(ChainSpec::Ehrenfest { n, p: p.clone(), s });
            specs.push(ChainSpec::BlDownUp { caps: caps.clone(), n, s });
            if s <= 7 - n {
                specs.push(ChainSpec::BlLevel { caps: caps.clone(), n, s });
                specs.push(ChainSpec::BlUpDown { caps: caps.clone(), n, s });
            }
        }
        specs.push(ChainSpec::Moran { n, m: m.clone(), p: p.clone() });
        specs.push(ChainSpec::Hubbell { n, m, p });
        specs.push(ChainSpec::GibbsDm { n, alpha });
        specs
    }

    #[test]
    fn moran_single_individual() {
        let m = q("1/10");
        let p = qs(&["1/4", "3/4"]);
        let spec = ChainSpec::Moran { n: 1, m: m.clone(), p: p.clone() };
        let row = transition_row(&spec, &[1, 0]).unwrap();
        assert_eq!(row[&vec![0, 1]], &m * &p[1]);
    }

    #[test]
    fn rows_sum_to_one_and_are_reversible() {
        for spec in every_family(4) {
            let k = build_transition_matrix(&spec).unwrap();
            let pi: Vec<ExactScalar> = k.states().iter().map(|x| spec.stationary_pmf(x).unwrap()).collect();
            for i in 0..k.len() {
                let total: ExactScalar = k.row(i).iter().map(|(_, v)| v.clone()).sum();
                assert!(total.is_one(), "{spec:?} row {i}");
                for (j, v) in k.row(i) {
                    assert!(*v > ExactScalar::zero());
                    assert_eq!(&pi[i] * v, &pi[*j] * k.entry(*j, i), "{spec:?}");
                }
            }
            assert_eq!(k.left_apply(&pi), pi, "{spec:?}");
        }
    }

    #[test]
    fn gibbs_is_the_full_level_model() {
        let alpha = qs(&["1", "2", "3"]);
        let gibbs = ChainSpec::GibbsDm { n: 3, alpha: alpha.clone() };
        let level = ChainSpec::PolyaLevel { n: 3, alpha, s: 3 };
        for x in gibbs.states(100).unwrap() {
            assert_eq!(transition_row(&gibbs, &x).unwrap(), transition_row(&level, &x).unwrap());
        }
    }

    #[test]
    fn moran_and_hubbell_are_pólya_chains() {
        for n in 2..=4 {
            for d in 2..=3 {
                let p = if d == 2 { qs(&["1/3", "2/3"]) } else { qs(&["1/5", "3/10", "1/2"]) };
                let m = q("2/9");
                let moran = ChainSpec::Moran { n, m: m.clone(), p: p.clone() };
                let level = ChainSpec::PolyaLevel { n, alpha: mutation_alpha(n, &m, &p), s: 1 };
                let hubbell = ChainSpec::Hubbell { n, m: m.clone(), p: p.clone() };
                let down_up = ChainSpec::PolyaDownUp { n, alpha: mutation_alpha(n - 1, &m, &p), s: 1 };
                for x in moran.states(100).unwrap() {
                    assert_eq!(transition_row(&moran, &x).unwrap(), transition_row(&level, &x).unwrap());
                    assert_eq!(transition_row(&hubbell, &x).unwrap(), transition_row(&down_up, &x).unwrap());
                }
            }
        }
    }

    #[test]
    fn bl_up_down_is_the_hypergeometric_gibbs_marginal() {
        // theta | x ~ x + H(s, l - x), then y | theta ~ H(N, theta)
        let caps = vec![2, 2, 2];
        let (n, s) = (2u64, 1u64);
        let spec = ChainSpec::BlUpDown { caps: caps.clone(), n, s };
        for x in spec.states(100).unwrap() {
            let mut gibbs = Row::new();
            let right = sub(&caps, &x);
            for z in enumerate_compositions(s, 3, Some(&right)) {
                let post = hypergeometric_weight(z.counts(), s, &right);
                let theta = add(&x, z.counts());
                for y in enumerate_compositions(n, 3, Some(&theta)) {
                    let lik = hypergeometric_weight(y.counts(), n, &theta);
                    deposit(&mut gibbs, y.into_counts(), &post * lik);
                }
            }
            assert_eq!(transition_row(&spec, &x).unwrap(), gibbs);
        }
    }

    #[test]
    fn bl_down_up_balance_small() {
        let spec = ChainSpec::BlDownUp { caps: vec![2, 2], n: 2, s: 1 };
        let k = build_transition_matrix(&spec).unwrap();
        let pi: Vec<ExactScalar> =
            k.states().iter().map(|x| hypergeometric_weight(x, 2, &[2, 2])).collect();
        assert_eq!(k.left_apply(&pi), pi);
    }

    #[test]
    fn capacity_refusal() {
        let spec = ChainSpec::PolyaLevel { n: 200, alpha: qs(&["1"; 5]), s: 1 };
        let x = vec![200, 0, 0, 0, 0];
        assert!(matches!(transition_row(&spec, &x), Err(Error::Capacity { .. })));
        assert!(transition_row_capped(&spec, &x, u64::MAX).is_ok());
        let mid = ChainSpec::PolyaLevel { n: 30, alpha: qs(&["1"; 4]), s: 1 };
        assert!(matches!(build_transition_matrix(&mid), Err(Error::Capacity { .. })));
    }

    #[test]
    fn gibbs_has_a_simple_unit_eigenvalue() {
        let spec = ChainSpec::GibbsDm { n: 3, alpha: qs(&["1", "2", "3"]) };
        let k = build_transition_matrix(&spec).unwrap();
        // reversible, so pi^{1/2} K pi^{-1/2} is symmetric
        let root: Vec<f64> = k.states().iter().map(|x| ratio_to_f64(&spec.stationary_pmf(x).unwrap()).sqrt()).collect();
        let dense = k.to_dense();
        let sym = DMatrix::from_fn(k.len(), k.len(), |i, j| root[i] * dense[(i, j)] / root[j]);
        let ev = sym.symmetric_eigen().eigenvalues;
        let ones = ev.iter().filter(|l| (*l - 1.0).abs() < 1e-9).count();
        assert_eq!(ones, 1);
        assert!(ev.iter().all(|l| *l < 1.0 + 1e-9));
    }

    #[test]
    fn rejects_foreign_states() {
        let spec = ChainSpec::BlLevel { caps: vec![1, 3], n: 2, s: 1 };
        assert!(transition_row(&spec, &[2, 0]).is_err());
        assert!(transition_row(&spec, &[1, 1]).is_ok());
    }
}
