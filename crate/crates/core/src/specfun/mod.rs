//! Special functions needed by the closed-form capacity expressions.
//!
//! * [`bessel_j0`] for the Jakes correlation model,
//! * [`exp_e1`] / [`exp_scaled_e1`] for the exponential integral,
//! * [`phi`] and [`theta`], the single and double log-exponential integrals
//!   that the capacity terms are assembled from.
//!
//! All functions are pure and validate their domain.

mod bessel;
mod expint;
pub mod quadrature;

pub use bessel::bessel_j0;
pub use expint::{exp_e1, exp_scaled_e1};
pub use quadrature::QuadratureSpec;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("{function}: argument {value} outside domain ({requirement})")]
pub struct SpecFunError {
    pub function: &'static str,
    pub value: f64,
    pub requirement: &'static str,
}

impl SpecFunError {
    pub(crate) fn domain(function: &'static str, value: f64, requirement: &'static str) -> Self {
        Self {
            function,
            value,
            requirement,
        }
    }
}

/// Relative gap `|m - n| / max(m, n)` below which [`theta`] uses its `m = n`
/// form at the midpoint rate.
///
/// Expanding about `b = (m + n) / 2` gives
/// `theta = I1(b) + (d/2)^2 I3(b) / 6 + ...` with `I_k = int x^k ln(x + a) e^(-b x)`,
/// so the midpoint form is off by about `(d / 2b)^2 <= 2.5e-9` relative, while
/// the difference quotient loses `~1e-15 / (d / b)` to cancellation.
pub const THETA_BRANCH_TOLERANCE: f64 = 1e-4;

fn positive(function: &'static str, x: f64) -> Result<f64, SpecFunError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(SpecFunError::domain(function, x, "finite and > 0"))
    }
}

/// phi(a, b) = integral over [0, inf) of ln(x + a) e^(-b x) dx
///           = (ln a + e^(ab) E1(ab)) / b.
pub fn phi(a: f64, b: f64) -> Result<f64, SpecFunError> {
    let a = positive("phi", a)?;
    let b = positive("phi", b)?;
    Ok((a.ln() + exp_scaled_e1(a * b)?) / b)
}

/// theta(a, m, n) = double integral over 0 <= x <= y < inf of
/// ln(y + a) e^(-m (y - x)) e^(-n x).
///
/// Equals `E[ln(U + V + a)] / (m n)` for independent exponentials of rates `m`
/// and `n`, so it is symmetric in `(m, n)`.
pub fn theta(a: f64, m: f64, n: f64) -> Result<f64, SpecFunError> {
    let a = positive("theta", a)?;
    let m = positive("theta", m)?;
    let n = positive("theta", n)?;
    if (m - n).abs() <= THETA_BRANCH_TOLERANCE * m.max(n) {
        let b = 0.5 * (m + n);
        let ab = a * b;
        Ok((1.0 - ab * exp_scaled_e1(ab)? + b * phi(a, b)?) / (b * b))
    } else {
        Ok((phi(a, n)? - phi(a, m)?) / (m - n))
    }
}
