//! Closed-form distribution of the selected link gain and the ergodic-capacity
//! lower bound built on it.
//!
//! The density of the estimated transmission-time gain of the selected relay,
//! for direction `j`, is a signed mixture of exponentials indexed by tuples
//! `(i, A)`: the selected relay `i` and a subset `A` of the other relays.
//! Every tuple contributes a "main" component with rate `1 / sigma_t^2` and,
//! when `A` is non-empty, a second component with rate `xi / sigma_t^2`.
//!
//! The capacity bound replaces the interference constant `c` by `m n`, which
//! turns each direction's log term into a difference of logarithms whose
//! expectations reduce to [`phi`] (single gain) and [`theta`] (sum of the two
//! selected gains, taken under the product of their marginal densities).

use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{LinkId, LinkTable, SchemeLinkStats};
use crate::sinr::SinrParams;
use crate::specfun::{phi, theta, SpecFunError};
use crate::CompensatedSum;

/// Largest relay count accepted by [`enumerate_terms`] by default.
pub const DEFAULT_ENUMERATION_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("{relays} relays exceed the enumeration cap of {cap}")]
    TooManyRelays { relays: usize, cap: usize },
    #[error("invalid statistics on link {link}: {reason}")]
    InvalidStats { link: LinkId, reason: &'static str },
    #[error("need one SINR parameter set per relay: got {found}, expected {expected}")]
    SinrShape { expected: usize, found: usize },
    #[error("the symmetric path needs relay-uniform statistics and SINR parameters")]
    NotSymmetric,
    #[error("{context}: {source}")]
    SpecialFunction {
        context: String,
        source: SpecFunError,
    },
}

/// Which enumeration to use for the tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnumerationPath {
    /// Symmetric when every relay has identical statistics, otherwise general.
    #[default]
    Auto,
    /// All `N 2^(N-1)` tuples.
    General,
    /// One representative tuple per subset size, weighted by `N C(N-1, t)`.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundOptions {
    pub enumeration_cap: usize,
    pub path: EnumerationPath,
    /// Test hook: scales the first double-integral term of the direction-1
    /// sum by this factor.
    pub theta_perturbation: Option<f64>,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self {
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            path: EnumerationPath::Auto,
            theta_perturbation: None,
        }
    }
}

/// One `(i, A)` tuple of the selected-gain density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdfTerm {
    pub relay: usize,
    /// Bit `l` set when relay `l` belongs to `A`.
    pub subset: u32,
    pub subset_size: usize,
    /// Number of tuples this term stands for (1 on the general path).
    pub multiplicity: f64,
    /// `(-1)^|A|`.
    pub sign: f64,
    pub weight: f64,
    /// `1 / sigma_t^2` of the selected link.
    pub rate: f64,
    pub xi: f64,
    pub zeta: f64,
}

/// A single exponential `amplitude * exp(-rate z)` of the assembled density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpComponent {
    pub amplitude: f64,
    pub rate: f64,
    /// Selected relay of the tuple the component came from.
    pub relay: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdfTermSet {
    pub direction: usize,
    pub relays: usize,
    pub terms: Vec<PdfTerm>,
}

impl PdfTermSet {
    pub fn components(&self) -> Vec<ExpComponent> {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            let base = t.multiplicity * t.sign * t.weight * t.rate;
            out.push(ExpComponent {
                amplitude: base,
                rate: t.rate,
                relay: t.relay,
            });
            if t.subset_size > 0 {
                out.push(ExpComponent {
                    amplitude: base * t.zeta,
                    rate: t.xi * t.rate,
                    relay: t.relay,
                });
            }
        }
        out
    }

    /// Number of `(i, A)` tuples represented.
    pub fn tuple_count(&self) -> f64 {
        self.terms.iter().map(|t| t.multiplicity).sum()
    }

    pub fn pdf(&self, z: f64) -> f64 {
        selected_gain_pdf(z, self)
    }

    /// `P(Z <= z)`.
    pub fn cdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        self.components()
            .iter()
            .map(|c| -c.amplitude / c.rate * (-c.rate * z).exp_m1())
            .collect::<CompensatedSum>()
            .value()
    }

    /// Probability mass on `[lower, upper]`.
    pub fn bin_mass(&self, lower: f64, upper: f64) -> f64 {
        let lower = lower.max(0.0);
        if upper <= lower {
            return 0.0;
        }
        self.components()
            .iter()
            .map(|c| {
                c.amplitude / c.rate
                    * (-c.rate * lower).exp()
                    * -(-c.rate * (upper - lower)).exp_m1()
            })
            .collect::<CompensatedSum>()
            .value()
    }

    /// Closed-form integral of the density over `[0, inf)`.
    pub fn total_mass(&self) -> f64 {
        self.components()
            .iter()
            .map(|c| c.amplitude / c.rate)
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn mean(&self) -> f64 {
        self.components()
            .iter()
            .map(|c| c.amplitude / (c.rate * c.rate))
            .collect::<CompensatedSum>()
            .value()
    }
}

/// The density of the selected gain at `z >= 0` (zero for `z < 0`).
pub fn selected_gain_pdf(z: f64, terms: &PdfTermSet) -> f64 {
    if z < 0.0 {
        return 0.0;
    }
    let mut sum = CompensatedSum::new();
    for t in &terms.terms {
        let base = t.multiplicity * t.sign * t.weight * t.rate;
        sum.add(base * (-t.rate * z).exp());
        if t.subset_size > 0 {
            sum.add(base * t.zeta * (-t.xi * t.rate * z).exp());
        }
    }
    sum.value()
}

fn check_stats(stats: &LinkTable<SchemeLinkStats>) -> Result<(), AnalyticError> {
    for link in stats.links() {
        let s = stats.get(link);
        let bad = |reason| Err(AnalyticError::InvalidStats { link, reason });
        if !(s.sigma_s2.is_finite() && s.sigma_s2 > 0.0) {
            return bad("selection variance must be positive");
        }
        if !(s.sigma_t2.is_finite() && s.sigma_t2 > 0.0) {
            return bad("transmission variance must be positive");
        }
        // only rho^2 enters the density, so outdated links past the first
        // Bessel zero keep their sign
        if !(-1.0..=1.0).contains(&s.rho) {
            return bad("correlation must lie in [-1, 1]");
        }
    }
    Ok(())
}

fn is_symmetric(stats: &LinkTable<SchemeLinkStats>) -> bool {
    stats.is_relay_uniform()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Tuples of the selected-gain density for `direction` (0 or 1).
///
/// `sigma_{s,l}^2` of a relay outside the selected one is the min-rate
/// parameter `s1 s2 / (s1 + s2)` of its two links.
pub fn enumerate_terms(
    direction: usize,
    stats: &LinkTable<SchemeLinkStats>,
    options: &BoundOptions,
) -> Result<PdfTermSet, AnalyticError> {
    let relays = stats.relays();
    if relays > options.enumeration_cap || relays > 31 {
        return Err(AnalyticError::TooManyRelays {
            relays,
            cap: options.enumeration_cap.min(31),
        });
    }
    check_stats(stats)?;
    let symmetric = match options.path {
        EnumerationPath::Auto => is_symmetric(stats),
        EnumerationPath::General => false,
        EnumerationPath::Symmetric => {
            if !is_symmetric(stats) {
                return Err(AnalyticError::NotSymmetric);
            }
            true
        }
    };
    let j = direction;
    let combined: Vec<f64> = (0..relays)
        .map(|l| {
            let a = stats.get(LinkId::new(0, l)).sigma_s2;
            let b = stats.get(LinkId::new(1, l)).sigma_s2;
            a * b / (a + b)
        })
        .collect();
    let term = |i: usize, subset: u32, size: usize, inv_sum: f64, multiplicity: f64| {
        let own = stats.get(LinkId::new(j, i));
        let other = stats.get(LinkId::new(1 - j, i));
        let rho2 = own.rho * own.rho;
        let den = rho2 / own.sigma_s2 + (1.0 - rho2) / combined[i] + (1.0 - rho2) * inv_sum;
        PdfTerm {
            relay: i,
            subset,
            subset_size: size,
            multiplicity,
            sign: if size.is_multiple_of(2) { 1.0 } else { -1.0 },
            weight: 1.0 / (1.0 + other.sigma_s2 * inv_sum),
            rate: 1.0 / own.sigma_t2,
            xi: (1.0 / combined[i] + inv_sum) / den,
            zeta: (other.sigma_s2 / own.sigma_s2) * inv_sum / den,
        }
    };
    let mut terms = Vec::new();
    if symmetric {
        let inv = 1.0 / combined[0];
        for t in 0..relays {
            let subset = if t == 0 { 0 } else { ((1u32 << t) - 1) << 1 };
            terms.push(term(
                0,
                subset,
                t,
                t as f64 * inv,
                relays as f64 * binomial(relays - 1, t),
            ));
        }
    } else {
        for i in 0..relays {
            let others: Vec<usize> = (0..relays).filter(|&l| l != i).collect();
            for pick in 0u32..(1u32 << others.len()) {
                let mut subset = 0u32;
                let mut inv_sum = CompensatedSum::new();
                for (bit, &l) in others.iter().enumerate() {
                    if pick >> bit & 1 == 1 {
                        subset |= 1 << l;
                        inv_sum.add(1.0 / combined[l]);
                    }
                }
                terms.push(term(
                    i,
                    subset,
                    pick.count_ones() as usize,
                    inv_sum.value(),
                    1.0,
                ));
            }
        }
    }
    Ok(PdfTermSet {
        direction,
        relays,
        terms,
    })
}

/// Expectation accumulators in nats and the bound in bits/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityBreakdown {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    /// `(t1 + t2 - t3 - t4) / (2 ln 2)`.
    pub capacity: f64,
}

fn spec_err(context: String) -> impl FnOnce(SpecFunError) -> AnalyticError {
    move |source| AnalyticError::SpecialFunction { context, source }
}

/// Closed-form lower bound on the ergodic capacity.
///
/// `params[i]` holds the SINR constants of relay `i`. The single-gain terms
/// use the constants of the selected relay; each double-integral term uses
/// those of the relay selected in the direction being expanded.
pub fn capacity_lower_bound(
    params: &[SinrParams],
    stats: &LinkTable<SchemeLinkStats>,
    options: &BoundOptions,
) -> Result<CapacityBreakdown, AnalyticError> {
    let relays = stats.relays();
    if params.len() != relays {
        return Err(AnalyticError::SinrShape {
            expected: relays,
            found: params.len(),
        });
    }
    let mut opts = *options;
    if opts.path == EnumerationPath::Auto && !params.windows(2).all(|w| w[0] == w[1]) {
        opts.path = EnumerationPath::General;
    }
    if opts.path == EnumerationPath::Symmetric && !params.windows(2).all(|w| w[0] == w[1]) {
        return Err(AnalyticError::NotSymmetric);
    }
    let comps = [
        enumerate_terms(0, stats, &opts)?.components(),
        enumerate_terms(1, stats, &opts)?.components(),
    ];
    let mut single = [0.0; 2];
    let mut double = [0.0; 2];
    for j in 0..2 {
        single[j] = single_gain_term(j, &comps[j], params)?;
        let perturb = if j == 0 {
            options.theta_perturbation
        } else {
            None
        };
        double[j] = sum_gain_term(j, &comps[j], &comps[1 - j], params, perturb)?;
    }
    let total: CompensatedSum = [single[0], single[1], -double[0], -double[1]]
        .into_iter()
        .collect();
    Ok(CapacityBreakdown {
        t1: single[0],
        t2: single[1],
        t3: double[0],
        t4: double[1],
        capacity: total.value() / (2.0 * std::f64::consts::LN_2),
    })
}

// E[ln(psi_r g_j + m_j) + ln(psi_s g_j + n_jbar)]
fn single_gain_term(
    j: usize,
    comps: &[ExpComponent],
    params: &[SinrParams],
) -> Result<f64, AnalyticError> {
    let mut sum = CompensatedSum::new();
    for (idx, c) in comps.iter().enumerate() {
        let p = &params[c.relay];
        let m = p.direction(j).m;
        let n = p.direction(1 - j).n;
        let ctx = || {
            format!(
                "direction {} component {} (relay {})",
                j + 1,
                idx,
                c.relay + 1
            )
        };
        sum.add(c.amplitude * phi(m, c.rate / p.psi_r).map_err(spec_err(ctx()))? / p.psi_r);
        sum.add(c.amplitude * phi(n, c.rate / p.psi_s).map_err(spec_err(ctx()))? / p.psi_s);
    }
    Ok(sum.value())
}

// E[ln((psi_s~ + psi_r~) g_j + psi_s~ g_jbar + m n)] under the product of marginals.
fn sum_gain_term(
    j: usize,
    near: &[ExpComponent],
    far: &[ExpComponent],
    params: &[SinrParams],
    perturbation: Option<f64>,
) -> Result<f64, AnalyticError> {
    let rows: Vec<Result<CompensatedSum, AnalyticError>> = near
        .par_iter()
        .enumerate()
        .map(|(a_idx, a)| {
            let d = params[a.relay].direction(j);
            let wide = d.psi_s_tilde + d.psi_r_tilde;
            let narrow = d.psi_s_tilde;
            let shift = d.m * d.n;
            let mut row = CompensatedSum::new();
            for (b_idx, b) in far.iter().enumerate() {
                let mut value = theta(shift, a.rate / wide, b.rate / narrow).map_err(spec_err(
                    format!("direction {} component pair ({a_idx}, {b_idx})", j + 1),
                ))?;
                if a_idx == 0 && b_idx == 0 {
                    if let Some(f) = perturbation {
                        value *= f;
                    }
                }
                row.add(a.amplitude * b.amplitude * value / (wide * narrow));
            }
            Ok(row)
        })
        .collect();
    let mut total = CompensatedSum::new();
    for row in rows {
        total.merge(&row?);
    }
    Ok(total.value())
}
