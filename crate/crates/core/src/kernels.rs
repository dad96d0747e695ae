//! Kernel polynomials `h_n(x, y)`: projections onto the degree-`n`
//! eigenspace, for the four stationary families.

use crate::error::{Error, Result};
use crate::numerics::{
    binomial, biguint_to_ratio, cancel_div, count_compositions, enumerate_compositions, falling_factorial, int,
    multinomial_coefficient, rising_factorial, ExactScalar, Field,
};

/// Largest number of inner-sum terms a general (off-diagonal) kernel will
/// enumerate before refusing.
pub const DEFAULT_TERM_LIMIT: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum KernelFamily {
    DirichletMultinomial { n: u64, alpha: Vec<ExactScalar> },
    Hypergeometric { n: u64, caps: Vec<u64> },
    Dirichlet { alpha: Vec<ExactScalar> },
    Multinomial { n: u64, p: Vec<ExactScalar> },
}

fn total<T: Field>(v: &[T]) -> T {
    v.iter().cloned().fold(T::zero(), |a, b| a + b)
}

fn coeff<T: Field>(l: &[u64]) -> T {
    T::from_ratio(&biguint_to_ratio(&multinomial_coefficient(&crate::numerics::Composition::new(l.to_vec()))))
}

fn check_terms(degree: u64, d: usize, limit: u64) -> Result<()> {
    let needed: num_bigint::BigUint = (0..=degree).map(|m| count_compositions(m, d)).sum();
    if needed > num_bigint::BigUint::from(limit) {
        return Err(Error::capacity("kernel inner sum", needed, limit));
    }
    Ok(())
}

/// `xi_m` for the Dirichlet-multinomial kernel at parameters `alpha`
/// (negative integers for the hypergeometric case).
fn dm_xi<T: Field>(m: u64, x: &[u64], y: &[u64], pop: u64, alpha: &[T]) -> T {
    let abs_alpha = total(alpha);
    let outer_num = rising_factorial(&abs_alpha, m);
    let shifted = rising_factorial(&(abs_alpha + int(pop as i64)), m);
    let outer_den = shifted.clone() * shifted;
    let mut acc = T::zero();
    for l in enumerate_compositions(m, alpha.len(), None) {
        let mut num = coeff::<T>(l.counts()) * outer_num.clone();
        let mut den = outer_den.clone();
        for (i, &li) in l.counts().iter().enumerate() {
            num = num
                * rising_factorial(&(alpha[i].clone() + int(x[i] as i64)), li)
                * rising_factorial(&(alpha[i].clone() + int(y[i] as i64)), li);
            den = den * rising_factorial(&alpha[i], li);
        }
        if let Some(t) = cancel_div(num, den) {
            acc = acc + t;
        }
    }
    acc
}

/// Alternating combination shared by the Dirichlet-multinomial and Dirichlet
/// kernels: `(|a|+2n-1) sum_m (-1)^{n-m} (|a|+m)_(n-1) / (m!(n-m)!) xi_m`.
fn alternating<T: Field>(n: u64, abs_alpha: &T, xi: impl Fn(u64) -> T) -> T {
    let mut acc = T::zero();
    for m in 0..=n {
        let c = rising_factorial(&(abs_alpha.clone() + int(m as i64)), n - 1)
            / (falling_factorial(&int::<T>(m as i64), m) * falling_factorial(&int::<T>((n - m) as i64), n - m));
        let term = c * xi(m);
        acc = if (n - m) % 2 == 1 { acc - term } else { acc + term };
    }
    (abs_alpha.clone() + int(2 * n as i64 - 1)) * acc
}

/// Dirichlet-multinomial kernel `h_n(x, y)` on compositions of `pop`.
pub fn dm_kernel<T: Field>(n: u64, x: &[u64], y: &[u64], pop: u64, alpha: &[T], limit: u64) -> Result<T> {
    if n > pop {
        return Err(Error::Domain(format!("degree {n} exceeds N = {pop}")));
    }
    if n == 0 {
        return Ok(T::one());
    }
    check_terms(n, alpha.len(), limit)?;
    let abs_alpha = total(alpha);
    let pre_num = rising_factorial(&(abs_alpha.clone() + int(pop as i64)), n);
    let pre_den = falling_factorial(&int::<T>(pop as i64), n);
    let sum = alternating(n, &abs_alpha, |m| dm_xi(m, x, y, pop, alpha));
    Ok(pre_num * sum / pre_den)
}

/// Hypergeometric kernel: the Dirichlet-multinomial kernel at `alpha = -l`.
pub fn hypergeometric_kernel(n: u64, x: &[u64], y: &[u64], pop: u64, caps: &[u64], limit: u64) -> Result<ExactScalar> {
    let alpha: Vec<ExactScalar> = caps.iter().map(|&l| int(-(l as i64))).collect();
    dm_kernel(n, x, y, pop, &alpha, limit)
}

/// Dirichlet kernel `h_n(w, z)` on the simplex.
pub fn dirichlet_kernel<T: Field>(n: u64, w: &[T], z: &[T], alpha: &[T]) -> T {
    if n == 0 {
        return T::one();
    }
    let abs_alpha = total(alpha);
    let xi = |m: u64| {
        let outer = rising_factorial(&abs_alpha, m);
        let mut acc = T::zero();
        for l in enumerate_compositions(m, alpha.len(), None) {
            let mut t = coeff::<T>(l.counts()) * outer.clone();
            for (i, &li) in l.counts().iter().enumerate() {
                t = t * (w[i].clone() * z[i].clone()).powu(li) / rising_factorial(&alpha[i], li);
            }
            acc = acc + t;
        }
        acc
    };
    alternating(n, &abs_alpha, xi)
}

/// Multinomial kernel `h_n(x, y)` on compositions of `pop`.
pub fn multinomial_kernel<T: Field>(n: u64, x: &[u64], y: &[u64], pop: u64, p: &[T], limit: u64) -> Result<T> {
    if n > pop {
        return Err(Error::Domain(format!("degree {n} exceeds N = {pop}")));
    }
    check_terms(n, p.len(), limit)?;
    let caps: Vec<u64> = x.iter().zip(y).map(|(a, b)| *a.min(b)).collect();
    let mut acc = T::zero();
    for m in 0..=n {
        let nm = falling_factorial(&int::<T>(pop as i64), m);
        let mut xi = T::zero();
        for l in enumerate_compositions(m, p.len(), Some(&caps)) {
            let mut t = coeff::<T>(l.counts());
            for (i, &li) in l.counts().iter().enumerate() {
                t = t * falling_factorial(&int::<T>(x[i] as i64), li) * falling_factorial(&int::<T>(y[i] as i64), li)
                    / p[i].powu(li);
            }
            xi = xi + t;
        }
        xi = xi / (nm.clone() * nm);
        let c = T::from_ratio(&biguint_to_ratio(&(binomial(pop, m) * binomial(pop - m, n - m))));
        let term = c * xi;
        acc = if (n - m) % 2 == 1 { acc - term } else { acc + term };
    }
    Ok(acc)
}

/// Closed form of `h_n(Ne_i, Ne_i)` for the Dirichlet-multinomial law, given
/// `|alpha|` and `alpha_i`. Negative integers give the hypergeometric case.
pub fn dm_diag_start<T: Field>(n: u64, pop: u64, abs_alpha: &T, alpha_i: &T) -> T {
    if n == 0 {
        return T::one();
    }
    let num = T::from_ratio(&biguint_to_ratio(&binomial(pop, n)))
        * (abs_alpha.clone() + int(2 * n as i64 - 1))
        * rising_factorial(abs_alpha, n - 1)
        * rising_factorial(&(abs_alpha.clone() - alpha_i.clone()), n);
    let den = rising_factorial(&(abs_alpha.clone() + int(pop as i64)), n) * rising_factorial(alpha_i, n);
    cancel_div(num, den).expect("denominator vanishes only with a vanishing numerator on valid inputs")
}

/// `h_n(Ne_i, Ne_i)` for the hypergeometric law with caps `l`; needs `l_i >= N`.
pub fn hypergeometric_diag_start(n: u64, pop: u64, caps: &[u64], i: usize) -> Result<ExactScalar> {
    if caps[i] < pop {
        return Err(Error::Domain(format!("N e_{} is outside the support: l_{} = {} < N = {pop}", i + 1, i + 1, caps[i])));
    }
    let abs_l: u64 = caps.iter().sum();
    Ok(dm_diag_start(n, pop, &int(-(abs_l as i64)), &int(-(caps[i] as i64))))
}

/// `h_n(e_i, e_i)` for the Dirichlet law.
pub fn dirichlet_diag_start<T: Field>(n: u64, abs_alpha: &T, alpha_i: &T) -> T {
    if n == 0 {
        return T::one();
    }
    (abs_alpha.clone() + int(2 * n as i64 - 1))
        * rising_factorial(abs_alpha, n - 1)
        * rising_factorial(&(abs_alpha.clone() - alpha_i.clone()), n)
        / (falling_factorial(&int::<T>(n as i64), n) * rising_factorial(alpha_i, n))
}

/// `h_n(Ne_i, Ne_i) = C(N, n) ((1 - p_i)/p_i)^n` for the multinomial law.
pub fn multinomial_diag_start<T: Field>(n: u64, pop: u64, p_i: &T) -> T {
    let r = (T::one() - p_i.clone()) / p_i.clone();
    T::from_ratio(&biguint_to_ratio(&binomial(pop, n))) * r.powu(n)
}

impl KernelFamily {
    pub fn dim(&self) -> usize {
        match self {
            KernelFamily::DirichletMultinomial { alpha, .. } | KernelFamily::Dirichlet { alpha } => alpha.len(),
            KernelFamily::Hypergeometric { caps, .. } => caps.len(),
            KernelFamily::Multinomial { p, .. } => p.len(),
        }
    }

    /// General kernel at lattice states (discrete families only).
    pub fn kernel(&self, n: u64, x: &[u64], y: &[u64]) -> Result<ExactScalar> {
        match self {
            KernelFamily::DirichletMultinomial { n: pop, alpha } => dm_kernel(n, x, y, *pop, alpha, DEFAULT_TERM_LIMIT),
            KernelFamily::Hypergeometric { n: pop, caps } => {
                hypergeometric_kernel(n, x, y, *pop, caps, DEFAULT_TERM_LIMIT)
            }
            KernelFamily::Multinomial { n: pop, p } => multinomial_kernel(n, x, y, *pop, p, DEFAULT_TERM_LIMIT),
            KernelFamily::Dirichlet { .. } => {
                Err(Error::InvalidParameter("the Dirichlet kernel takes simplex points; use kernel_at_points".into()))
            }
        }
    }

    /// Dirichlet kernel at simplex points.
    pub fn kernel_at_points(&self, n: u64, w: &[ExactScalar], z: &[ExactScalar]) -> Result<ExactScalar> {
        match self {
            KernelFamily::Dirichlet { alpha } => Ok(dirichlet_kernel(n, w, z, alpha)),
            _ => Err(Error::InvalidParameter("kernel_at_points is for the Dirichlet family".into())),
        }
    }

    /// `h_n` at the corner `Ne_i` (or `e_i` for Dirichlet), by closed form.
    pub fn kernel_diag_start(&self, n: u64, i: usize) -> Result<ExactScalar> {
        if i >= self.dim() {
            return Err(Error::InvalidParameter(format!("color index {i} out of range")));
        }
        match self {
            KernelFamily::DirichletMultinomial { n: pop, alpha } => {
                if n > *pop {
                    return Err(Error::Domain(format!("degree {n} exceeds N = {pop}")));
                }
                Ok(dm_diag_start(n, *pop, &total(alpha), &alpha[i]))
            }
            KernelFamily::Hypergeometric { n: pop, caps } => hypergeometric_diag_start(n, *pop, caps, i),
            KernelFamily::Dirichlet { alpha } => Ok(dirichlet_diag_start(n, &total(alpha), &alpha[i])),
            KernelFamily::Multinomial { n: pop, p } => Ok(multinomial_diag_start(n, *pop, &p[i])),
        }
    }
}
