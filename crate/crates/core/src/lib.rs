//! Spectral chi-square analysis for multivariate urn chains and Gaussian
//! autoregressive processes.

pub mod chains;
pub mod cli;
pub mod convergence;
pub mod distributions;
pub mod error;
pub mod kernels;
pub mod numerics;
pub mod orthopoly;
pub mod rng;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
