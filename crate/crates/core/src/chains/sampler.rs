use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{noise_covariance, ChainSpec};
use crate::distributions::{sample_dirichlet_multinomial, sample_hypergeometric, sample_multinomial};
use crate::error::{Error, Result};
use crate::numerics::ratio_to_f64;

/// A point of a chain's state space.
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Counts(Vec<u64>),
    Point(DVector<f64>),
}

#[derive(Clone, Copy, Debug)]
enum Order {
    Level,
    DownUp,
    UpDown,
}

#[derive(Clone, Debug)]
enum Prepared {
    Polya { order: Order, alpha: Vec<f64>, s: u64 },
    Mutation { n: u64, m: f64, p: Vec<f64>, exclude_self: bool },
    Gibbs { n: u64, alpha: Vec<f64> },
    Bl { order: Order, caps: Vec<u64>, s: u64 },
    Ehrenfest { p: Vec<f64>, s: u64 },
    Ar { a: DMatrix<f64>, noise_root: DMatrix<f64> },
}

/// Single-step sampler with parameters converted once to doubles.
#[derive(Clone, Debug)]
pub struct ChainSampler {
    spec: ChainSpec,
    prepared: Prepared,
}

fn to_f64s(v: &[crate::numerics::ExactScalar]) -> Vec<f64> {
    v.iter().map(ratio_to_f64).collect()
}

/// Symmetric square root of a positive semidefinite matrix.
fn psd_root(v: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (v + v.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

/// Color of the `u`-th individual when counts are laid end to end.
fn color_of(counts: &[u64], mut u: u64) -> usize {
    for (i, &c) in counts.iter().enumerate() {
        if u < c {
            return i;
        }
        u -= c;
    }
    unreachable!("index beyond the population")
}

fn pick_categorical<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let mut u: f64 = rng.random();
    for (i, &w) in p.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    p.len() - 1
}

fn add_assign(x: &mut [u64], z: &[u64]) {
    x.iter_mut().zip(z).for_each(|(a, b)| *a += b);
}

fn sub_assign(x: &mut [u64], y: &[u64]) {
    x.iter_mut().zip(y).for_each(|(a, b)| *a -= b);
}

fn weights(x: &[u64], alpha: &[f64]) -> Vec<f64> {
    x.iter().zip(alpha).map(|(&xi, a)| a + xi as f64).collect()
}

impl ChainSampler {
    pub fn new(spec: &ChainSpec) -> Result<Self> {
        spec.validate()?;
        let prepared = match spec {
            ChainSpec::PolyaLevel { alpha, s, .. } => Prepared::Polya { order: Order::Level, alpha: to_f64s(alpha), s: *s },
            ChainSpec::PolyaDownUp { alpha, s, .. } => {
                Prepared::Polya { order: Order::DownUp, alpha: to_f64s(alpha), s: *s }
            }
            ChainSpec::PolyaUpDown { alpha, s, .. } => {
                Prepared::Polya { order: Order::UpDown, alpha: to_f64s(alpha), s: *s }
            }
            ChainSpec::Moran { n, m, p } => {
                Prepared::Mutation { n: *n, m: ratio_to_f64(m), p: to_f64s(p), exclude_self: false }
            }
            ChainSpec::Hubbell { n, m, p } => {
                Prepared::Mutation { n: *n, m: ratio_to_f64(m), p: to_f64s(p), exclude_self: true }
            }
            ChainSpec::GibbsDm { n, alpha } => Prepared::Gibbs { n: *n, alpha: to_f64s(alpha) },
            ChainSpec::BlLevel { caps, s, .. } => Prepared::Bl { order: Order::Level, caps: caps.clone(), s: *s },
            ChainSpec::BlDownUp { caps, s, .. } => Prepared::Bl { order: Order::DownUp, caps: caps.clone(), s: *s },
            ChainSpec::BlUpDown { caps, s, .. } => Prepared::Bl { order: Order::UpDown, caps: caps.clone(), s: *s },
            ChainSpec::Ehrenfest { p, s, .. } => Prepared::Ehrenfest { p: to_f64s(p), s: *s },
            ChainSpec::NormalAr { a, sigma } => {
                Prepared::Ar { a: a.clone(), noise_root: psd_root(&noise_covariance(a, sigma)) }
            }
        };
        Ok(ChainSampler { spec: spec.clone(), prepared })
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    /// One transition of a finite chain, in place.
    pub fn step_counts<R: Rng + ?Sized>(&self, x: &mut Vec<u64>, rng: &mut R) {
        match &self.prepared {
            Prepared::Polya { order, alpha, s } => match order {
                Order::Level => {
                    let z = sample_dirichlet_multinomial(*s, &weights(x, alpha), rng);
                    let y = sample_hypergeometric(*s, x, rng);
                    sub_assign(x, &y);
                    add_assign(x, &z);
                }
                Order::DownUp => {
                    let y = sample_hypergeometric(*s, x, rng);
                    sub_assign(x, &y);
                    let z = sample_dirichlet_multinomial(*s, &weights(x, alpha), rng);
                    add_assign(x, &z);
                }
                Order::UpDown => {
                    let z = sample_dirichlet_multinomial(*s, &weights(x, alpha), rng);
                    add_assign(x, &z);
                    let y = sample_hypergeometric(*s, x, rng);
                    sub_assign(x, &y);
                }
            },
            Prepared::Mutation { n, m, p, exclude_self } => {
                let j = color_of(x, rng.random_range(0..*n));
                let k = if *exclude_self {
                    x[j] -= 1;
                    let k = color_of(x, rng.random_range(0..n - 1));
                    x[j] += 1;
                    k
                } else {
                    color_of(x, rng.random_range(0..*n))
                };
                let i = if rng.random::<f64>() < *m { pick_categorical(p, rng) } else { k };
                x[j] -= 1;
                x[i] += 1;
            }
            Prepared::Gibbs { n, alpha } => {
                *x = sample_dirichlet_multinomial(*n, &weights(x, alpha), rng);
            }
            Prepared::Bl { order, caps, s } => {
                let right: Vec<u64> = caps.iter().zip(x.iter()).map(|(l, xi)| l - xi).collect();
                match order {
                    Order::Level => {
                        let y = sample_hypergeometric(*s, x, rng);
                        let z = sample_hypergeometric(*s, &right, rng);
                        sub_assign(x, &y);
                        add_assign(x, &z);
                    }
                    Order::DownUp => {
                        let y = sample_hypergeometric(*s, x, rng);
                        let mut right = right;
                        add_assign(&mut right, &y);
                        sub_assign(x, &y);
                        let z = sample_hypergeometric(*s, &right, rng);
                        add_assign(x, &z);
                    }
                    Order::UpDown => {
                        let z = sample_hypergeometric(*s, &right, rng);
                        add_assign(x, &z);
                        let y = sample_hypergeometric(*s, x, rng);
                        sub_assign(x, &y);
                    }
                }
            }
            Prepared::Ehrenfest { p, s } => {
                let y = sample_hypergeometric(*s, x, rng);
                let z = sample_multinomial(*s, p, rng);
                sub_assign(x, &y);
                add_assign(x, &z);
            }
            Prepared::Ar { .. } => panic!("the AR process has a continuous state; use step_point"),
        }
    }

    /// One transition `x -> A x + xi` of the AR process.
    pub fn step_point<R: Rng + ?Sized>(&self, x: &DVector<f64>, rng: &mut R) -> DVector<f64> {
        match &self.prepared {
            Prepared::Ar { a, noise_root } => {
                let g = DVector::from_fn(x.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
                a * x + noise_root * g
            }
            _ => panic!("finite chains step through step_counts"),
        }
    }

    pub fn step<R: Rng + ?Sized>(&self, x: &State, rng: &mut R) -> Result<State> {
        match (x, self.spec.is_finite()) {
            (State::Counts(c), true) => {
                self.spec.require_state(c)?;
                let mut next = c.clone();
                self.step_counts(&mut next, rng);
                Ok(State::Counts(next))
            }
            (State::Point(v), false) if v.len() == self.spec.dim() => Ok(State::Point(self.step_point(v, rng))),
            _ => Err(Error::Domain(format!("state does not belong to a {} chain", self.spec.name()))),
        }
    }
}

/// One transition of `spec` from `x`.
pub fn step<R: Rng + ?Sized>(spec: &ChainSpec, x: &State, rng: &mut R) -> Result<State> {
    ChainSampler::new(spec)?.step(x, rng)
}

/// `sum x_i^2 / N^2`.
pub fn watterson(x: &[u64]) -> f64 {
    let n: u64 = x.iter().sum();
    assert!(n > 0, "empty population");
    let sq: f64 = x.iter().map(|&v| (v as f64) * (v as f64)).sum();
    sq / (n as f64 * n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::tests::qs;
    use crate::chains::transition_row;
    use crate::distributions::dm_weight;
    use crate::numerics::{enumerate_compositions, ExactScalar};
    use crate::rng::replica_stream;
    use std::collections::HashMap;

    fn empirical_matches_row(spec: &ChainSpec, x: &[u64], reps: u64, seed: u64) {
        let sampler = ChainSampler::new(spec).unwrap();
        let mut rng = replica_stream(seed, 0);
        let mut hits: HashMap<Vec<u64>, u64> = HashMap::new();
        for _ in 0..reps {
            let mut y = x.to_vec();
            sampler.step_counts(&mut y, &mut rng);
            *hits.entry(y).or_default() += 1;
        }
        let row = transition_row(spec, x).unwrap();
        for y in hits.keys() {
            assert!(row.contains_key(y), "{spec:?}: sampled {y:?} outside the row");
        }
        for (y, p) in &row {
            let p = ratio_to_f64(p);
            let freq = *hits.get(y).unwrap_or(&0) as f64 / reps as f64;
            let se = (p * (1.0 - p) / reps as f64).sqrt();
            assert!((freq - p).abs() <= 4.0 * se + 1e-12, "{spec:?} {x:?}->{y:?}: {freq} vs {p}");
        }
    }

    #[test]
    fn ehrenfest_without_moves_stays_put() {
        let spec = ChainSpec::Ehrenfest { n: 4, p: qs(&["1/2", "1/2"]), s: 0 };
        let mut rng = replica_stream(1, 0);
        let x = State::Counts(vec![3, 1]);
        for _ in 0..20 {
            assert_eq!(step(&spec, &x, &mut rng).unwrap(), x);
        }
    }

    #[test]
    fn zero_ar_matrix_draws_the_noise_law() {
        let sigma = DMatrix::from_row_slice(2, 2, &[2.0, 0.6, 0.6, 1.0]);
        let spec = ChainSpec::NormalAr { a: DMatrix::zeros(2, 2), sigma: sigma.clone() };
        let sampler = ChainSampler::new(&spec).unwrap();
        let mut rng = replica_stream(2, 0);
        let reps = 100_000;
        let x = DVector::from_vec(vec![5.0, -3.0]);
        let mut cov = DMatrix::<f64>::zeros(2, 2);
        let mut mean = DVector::<f64>::zeros(2);
        for _ in 0..reps {
            let y = sampler.step_point(&x, &mut rng);
            cov += &y * y.transpose();
            mean += y;
        }
        mean /= reps as f64;
        cov /= reps as f64;
        assert!(mean.amax() < 0.02);
        assert!((cov - sigma).amax() < 0.03);
    }

    #[test]
    fn samplers_follow_the_exact_rows() {
        let alpha = qs(&["1", "1"]);
        empirical_matches_row(&ChainSpec::PolyaDownUp { n: 3, alpha: alpha.clone(), s: 1 }, &[2, 1], 100_000, 3);
        let a3 = qs(&["1/2", "1", "3/2"]);
        let p3 = qs(&["1/5", "3/10", "1/2"]);
        let m = qs(&["1/7"])[0].clone();
        let cases = vec![
            (ChainSpec::PolyaLevel { n: 3, alpha: a3.clone(), s: 2 }, vec![2, 1, 0]),
            (ChainSpec::PolyaUpDown { n: 3, alpha: a3.clone(), s: 2 }, vec![0, 1, 2]),
            (ChainSpec::Moran { n: 3, m: m.clone(), p: p3.clone() }, vec![2, 0, 1]),
            (ChainSpec::Hubbell { n: 3, m, p: p3.clone() }, vec![2, 0, 1]),
            (ChainSpec::GibbsDm { n: 2, alpha: a3 }, vec![2, 0, 0]),
            (ChainSpec::BlLevel { caps: vec![2, 2, 2], n: 3, s: 2 }, vec![2, 1, 0]),
            (ChainSpec::BlDownUp { caps: vec![2, 2, 2], n: 3, s: 2 }, vec![2, 1, 0]),
            (ChainSpec::BlUpDown { caps: vec![2, 2, 2], n: 3, s: 2 }, vec![2, 1, 0]),
            (ChainSpec::Ehrenfest { n: 3, p: p3, s: 2 }, vec![3, 0, 0]),
        ];
        for (i, (spec, x)) in cases.iter().enumerate() {
            empirical_matches_row(spec, x, 100_000, 10 + i as u64);
        }
    }

    #[test]
    fn watterson_values() {
        assert_eq!(watterson(&[0, 7, 0]), 1.0);
        assert!((watterson(&[4, 4, 4, 4, 4]) - 0.2).abs() < 1e-15);
        // mean under DM(3, (1, 1)) by enumeration against the moment formula
        let alpha = qs(&["1", "1"]);
        let mean: f64 = enumerate_compositions(3, 2, None)
            .iter()
            .map(|x| watterson(x.counts()) * ratio_to_f64(&dm_weight::<ExactScalar>(x.counts(), &alpha)))
            .sum();
        // E x_1^2 = N(N+1)/3 for the uniform law on {0..N}; two colors by symmetry
        let n = 3.0;
        let expect = 2.0 * (n * (2.0 * n + 1.0) / 6.0) / (n * n);
        assert!((mean - expect).abs() < 1e-12);
    }
}
