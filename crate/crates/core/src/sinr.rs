//! Instantaneous end-to-end SINR and capacity of two-way amplify-and-forward
//! relaying with residual self-interference from imperfect channel estimates.
//!
//! Direction `j` is the signal received at source `j`. Its "near" gain is the
//! estimated gain of the link between source `j` and the relay, "far" the gain
//! of the other source's link.

use thiserror::Error;

use crate::channel::{CsiConfig, LinkId, NetworkConfig};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SinrError {
    #[error("{name} must be non-negative and finite, got {value}")]
    Domain { name: &'static str, value: f64 },
    #[error("{name} must be positive and finite, got {value}")]
    NotPositive { name: &'static str, value: f64 },
}

/// Per-direction constants derived from the SNRs and estimation errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionConstants {
    pub psi_s_tilde: f64,
    pub psi_r_tilde: f64,
    pub c: f64,
    /// `psi_s_tilde / psi_s`.
    pub m: f64,
    /// `(psi_s_tilde + psi_r_tilde) / psi_r`.
    pub n: f64,
}

/// SNRs of one relay's pair of links plus the derived constants of both directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrParams {
    pub psi_s: f64,
    pub psi_r: f64,
    /// Estimation error variance of the link to source 1 and source 2.
    pub estimation_error: [f64; 2],
    directions: [DirectionConstants; 2],
}

impl SinrParams {
    pub fn new(psi_s: f64, psi_r: f64, estimation_error: [f64; 2]) -> Result<Self, SinrError> {
        for (name, value) in [("psi_s", psi_s), ("psi_r", psi_r)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(SinrError::NotPositive { name, value });
            }
        }
        for value in estimation_error {
            non_negative("estimation_error", value)?;
        }
        let constants = |j: usize| {
            let near = estimation_error[j];
            let far = estimation_error[1 - j];
            let sr = psi_s * psi_r;
            let psi_s_tilde = psi_s + sr * near;
            let psi_r_tilde = psi_r + 3.0 * sr * near + sr * far;
            let c = 2.0 * sr * near * near + sr * far * far + psi_r * near + 1.0;
            DirectionConstants {
                psi_s_tilde,
                psi_r_tilde,
                c,
                m: psi_s_tilde / psi_s,
                n: (psi_s_tilde + psi_r_tilde) / psi_r,
            }
        };
        Ok(Self {
            psi_s,
            psi_r,
            estimation_error,
            directions: [constants(0), constants(1)],
        })
    }

    pub fn perfect(psi_s: f64, psi_r: f64) -> Result<Self, SinrError> {
        Self::new(psi_s, psi_r, [0.0, 0.0])
    }

    pub fn direction(&self, j: usize) -> &DirectionConstants {
        &self.directions[j]
    }
}

/// One parameter set per relay, from the network powers and each relay's two
/// estimation error variances.
pub fn relay_params(
    network: &NetworkConfig,
    csi: &CsiConfig,
) -> Result<Vec<SinrParams>, SinrError> {
    (0..network.relays)
        .map(|i| {
            let err = |j| *csi.estimation_error_variance.get(LinkId::new(j, i));
            SinrParams::new(network.psi_s(), network.psi_r(), [err(0), err(1)])
        })
        .collect()
}

fn non_negative(name: &'static str, value: f64) -> Result<f64, SinrError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(SinrError::Domain { name, value })
    }
}

/// SINR at source `direction` given the near and far estimated gains.
pub fn sinr(near: f64, far: f64, params: &SinrParams, direction: usize) -> Result<f64, SinrError> {
    let near = non_negative("near gain", near)?;
    let far = non_negative("far gain", far)?;
    let d = params.direction(direction);
    let numerator = params.psi_r * params.psi_s * near * far;
    let denominator = (d.psi_s_tilde + d.psi_r_tilde) * near + d.psi_s_tilde * far + d.c;
    Ok(numerator / denominator)
}

/// SINRs of both directions for the gains `g1` (source 1 link) and `g2`.
pub fn sinr_pair(g1: f64, g2: f64, params: &SinrParams) -> Result<(f64, f64), SinrError> {
    Ok((sinr(g1, g2, params, 0)?, sinr(g2, g1, params, 1)?))
}

/// `0.5 log2(1 + gamma_1) + 0.5 log2(1 + gamma_2)` in bits/s/Hz.
pub fn instantaneous_capacity(gamma_1: f64, gamma_2: f64) -> f64 {
    0.5 * (gamma_1.ln_1p() + gamma_2.ln_1p()) / std::f64::consts::LN_2
}

/// Diagnostic pair for the max–min ranking approximation:
/// `(gamma_1 gamma_2, psi_r psi_s min(g1, g2)^2)`.
pub fn min_approx_bound_check(
    g1: f64,
    g2: f64,
    params: &SinrParams,
) -> Result<(f64, f64), SinrError> {
    let (gamma_1, gamma_2) = sinr_pair(g1, g2, params)?;
    let low = g1.min(g2);
    Ok((gamma_1 * gamma_2, params.psi_r * params.psi_s * low * low))
}

/// The per-draw integrand of the capacity lower bound: each direction's SINR
/// with its constant `c` replaced by `m n`, written as a log-ratio.
pub fn bound_form_capacity(g1: f64, g2: f64, params: &SinrParams) -> Result<f64, SinrError> {
    let [first, second] = bound_form_terms(g1, g2, params)?;
    Ok(first + second)
}

/// The two half-rate terms of [`bound_form_capacity`], in bits/s/Hz.
pub fn bound_form_terms(g1: f64, g2: f64, params: &SinrParams) -> Result<[f64; 2], SinrError> {
    let g1 = non_negative("gain", g1)?;
    let g2 = non_negative("gain", g2)?;
    let (s, r) = (params.psi_s, params.psi_r);
    let d1 = params.direction(0);
    let d2 = params.direction(1);
    let first = ((r * g1 + d1.m).ln() + (s * g2 + d1.n).ln())
        - ((d1.psi_s_tilde + d1.psi_r_tilde) * g1 + d1.psi_s_tilde * g2 + d1.m * d1.n).ln();
    let second = ((s * g1 + d2.n).ln() + (r * g2 + d2.m).ln())
        - (d2.psi_s_tilde * g1 + (d2.psi_s_tilde + d2.psi_r_tilde) * g2 + d2.m * d2.n).ln();
    let scale = 0.5 / std::f64::consts::LN_2;
    Ok([scale * first, scale * second])
}
