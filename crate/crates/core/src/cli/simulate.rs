//! Replica simulation and the histograms the `simulate` command writes.

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::chains::{watterson, ChainSampler, ChainSpec, State, DEFAULT_STATE_CAP};
use crate::error::{Error, Result};
use crate::numerics::ratio_to_f64;
use crate::rng::replica_stream;

pub const DEFAULT_CHECKPOINTS: [u64; 7] = [1, 10, 50, 100, 200, 500, 1000];

/// Default checkpoints up to `steps`, always ending at `steps`.
pub fn checkpoints_for(steps: u64) -> Vec<u64> {
    let mut v: Vec<u64> = DEFAULT_CHECKPOINTS.iter().copied().filter(|&c| c <= steps).collect();
    if v.last() != Some(&steps) {
        v.push(steps);
    }
    v
}

/// States of every replica at each checkpoint, indexed `[checkpoint][replica]`.
/// Replica `r` draws from its own stream, so output is schedule-independent.
pub fn run_replicas(spec: &ChainSpec, start: &State, replicas: u64, checkpoints: &[u64], seed: u64) -> Result<Vec<Vec<State>>> {
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("checkpoints must increase".into()));
    }
    let sampler = ChainSampler::new(spec)?;
    if let State::Counts(x) = start {
        spec.require_state(x)?;
    }
    let runs: Vec<Vec<State>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_stream(seed, r);
            let mut out = Vec::with_capacity(checkpoints.len());
            let mut t = 0;
            let mut state = start.clone();
            for &c in checkpoints {
                match &mut state {
                    State::Counts(x) => {
                        while t < c {
                            sampler.step_counts(x, &mut rng);
                            t += 1;
                        }
                    }
                    State::Point(p) => {
                        while t < c {
                            *p = sampler.step_point(p, &mut rng);
                            t += 1;
                        }
                    }
                }
                out.push(state.clone());
            }
            out
        })
        .collect();
    Ok((0..checkpoints.len()).map(|k| runs.iter().map(|r| r[k].clone()).collect()).collect())
}

/// Equal-width bin of `[0, 1]`.
pub fn unit_bin(v: f64, bins: usize) -> usize {
    ((v * bins as f64).floor().max(0.0) as usize).min(bins - 1)
}

pub fn watterson_histogram(states: &[State], bins: usize) -> Vec<u64> {
    let mut h = vec![0; bins];
    for s in states {
        if let State::Counts(x) = s {
            h[unit_bin(watterson(x), bins)] += 1;
        }
    }
    h
}

/// Stationary probability of each Watterson bin, by enumeration.
pub fn stationary_watterson_bins(spec: &ChainSpec, bins: usize) -> Result<Vec<f64>> {
    let mut h = vec![0.0; bins];
    for x in spec.states(DEFAULT_STATE_CAP)? {
        h[unit_bin(watterson(&x), bins)] += ratio_to_f64(&spec.stationary_pmf(&x)?);
    }
    Ok(h)
}

/// Bin edges for the first AR coordinate: `+-4` stationary standard deviations.
pub fn coordinate_range(spec: &ChainSpec) -> Option<(f64, f64)> {
    match spec {
        ChainSpec::NormalAr { sigma, .. } => {
            let sd = sigma[(0, 0)].sqrt();
            Some((-4.0 * sd, 4.0 * sd))
        }
        _ => None,
    }
}

pub fn coordinate_histogram(states: &[State], lo: f64, hi: f64, bins: usize) -> Vec<u64> {
    let mut h = vec![0; bins];
    for s in states {
        if let State::Point(p) = s {
            let u = (p[0] - lo) / (hi - lo);
            if (0.0..1.0).contains(&u) {
                h[unit_bin(u, bins)] += 1;
            }
        }
    }
    h
}

pub fn stationary_coordinate_bins(spec: &ChainSpec, bins: usize) -> Option<Vec<f64>> {
    let (lo, hi) = coordinate_range(spec)?;
    let normal = Normal::new(0.0, hi / 4.0).ok()?;
    let w = (hi - lo) / bins as f64;
    Some((0..bins).map(|k| normal.cdf(lo + (k + 1) as f64 * w) - normal.cdf(lo + k as f64 * w)).collect())
}
