//! Scalar regimes and combinatorial primitives.

mod combinatorics;
mod field;
mod log_scalar;
pub mod quadrature;

pub use combinatorics::{
    binomial, binomial_field, biguint_to_ratio, biguint_to_u64, count_bounded_compositions, count_compositions,
    enumerate_compositions, factorial, falling_factorial, multinomial_coefficient, parse_rational, rising_factorial,
    BoundedComposition, Composition,
};
pub use field::{cancel_div, int, ln_abs_bigint, ratio_to_f64, ExactScalar, Field};
pub use log_scalar::LogScalar;

/// Renders an exact value as `p/q` (or `p` for integers).
pub fn format_ratio(r: &ExactScalar) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ratio_from_f64(v: f64) -> Option<ExactScalar> {
    ExactScalar::from_float(v)
}
