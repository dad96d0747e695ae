use crate::error::{Error, Result};

const EXPLICIT_MAX: u64 = 30;

/// Physicists' Hermite polynomial `H_n(x)`.
pub fn hermite(n: u64, x: f64) -> f64 {
    if n <= EXPLICIT_MAX {
        // coefficients of (2x)^{n-2k}: c_0 = 1, c_{k+1} = -c_k (n-2k)(n-2k-1)/(k+1)
        let mut c = 1.0;
        let mut acc = 0.0;
        for k in 0..=n / 2 {
            acc += c * (2.0 * x).powi((n - 2 * k) as i32);
            c *= -(((n - 2 * k) * (n - 2 * k).saturating_sub(1)) as f64) / (k + 1) as f64;
        }
        return acc;
    }
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `sum_n H_n(x)^2 t^n / (2^n n!)` in closed form.
pub fn hermite_square_gf(x: f64, t: f64) -> Result<f64> {
    if t.abs() >= 1.0 {
        return Err(Error::Domain(format!("|t| must be < 1, got {t}")));
    }
    Ok((2.0 * x * x * t / (1.0 + t)).exp() / (1.0 - t * t).sqrt())
}

/// Partial sum of the same series through degree `terms`, using the
/// normalized recurrence so no factorial overflows.
pub fn hermite_square_series(x: f64, t: f64, terms: u64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut acc = 0.0;
    let mut tp = 1.0;
    for n in 0..=terms {
        acc += cur * cur * tp;
        let nf = n as f64;
        let next = x * (2.0 / (nf + 1.0)).sqrt() * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        tp *= t;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::gauss_hermite;

    #[test]
    fn low_degrees() {
        assert_eq!(hermite(0, 0.7), 1.0);
        assert_eq!(hermite(1, 0.7), 1.4);
        assert_eq!(hermite(2, 1.0), 2.0);
        assert_eq!(hermite(3, 0.5), 8.0 * 0.125 - 12.0 * 0.5);
    }

    #[test]
    fn recurrence_agrees_with_explicit_sum_at_switch() {
        let x = 0.37;
        let (mut prev, mut cur) = (1.0, 2.0 * x);
        for k in 1..EXPLICIT_MAX {
            let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
            prev = cur;
            cur = next;
        }
        assert!((cur - hermite(EXPLICIT_MAX, x)).abs() < 1e-9 * cur.abs());
        let h31 = hermite(31, x);
        assert!((h31 - (2.0 * x * cur - 60.0 * prev)).abs() < 1e-9 * h31.abs());
    }

    #[test]
    fn orthogonality_by_quadrature() {
        let rule = gauss_hermite(30);
        let sp = std::f64::consts::PI.sqrt();
        let ip = |m: u64, n: u64| rule.integrate(|y| hermite(m, y) * hermite(n, y)) / sp;
        assert!(ip(2, 3).abs() < 1e-8);
        assert!((ip(3, 3) - 48.0).abs() < 1e-8);
    }

    #[test]
    fn generating_function() {
        assert!((hermite_square_gf(0.0, 0.4).unwrap() - 1.0 / (1.0f64 - 0.16).sqrt()).abs() < 1e-15);
        assert_eq!(hermite_square_gf(1.3, 0.0).unwrap(), 1.0);
        let closed = hermite_square_gf(1.0, 0.5).unwrap();
        assert!((hermite_square_series(1.0, 0.5, 200) - closed).abs() < 1e-10);
        assert!(hermite_square_gf(0.0, 1.0).is_err());
    }
}
