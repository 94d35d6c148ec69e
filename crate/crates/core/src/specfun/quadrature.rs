//! Globally adaptive Gauss–Kronrod (7/15) integration.
//!
//! Used as an independent numerical route for checking the closed forms of this
//! crate. Semi-infinite ranges are handled by integrating over geometrically
//! growing panels until the integrand has decayed below `1e-16` of its peak.

use thiserror::Error;

/// Tolerances and work limit for one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(
        abs_tol: f64,
        rel_tol: f64,
        max_subdivisions: usize,
    ) -> Result<Self, QuadratureError> {
        if !(abs_tol > 0.0 && rel_tol > 0.0 && max_subdivisions >= 1) {
            return Err(QuadratureError::InvalidSpec);
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("quadrature tolerances must be positive and the subdivision limit at least 1")]
    InvalidSpec,
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
    #[error("subdivision limit reached with estimated error {abs_error:e} (value {value})")]
    SubdivisionLimit { value: f64, abs_error: f64 },
    #[error("integrand did not decay on [{lower}, infinity)")]
    NoDecay { lower: f64 },
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lower: f64,
    upper: f64,
    value: f64,
    error: f64,
    peak: f64,
}

fn kronrod<F: FnMut(f64) -> f64>(
    f: &mut F,
    lower: f64,
    upper: f64,
) -> Result<Panel, QuadratureError> {
    let center = 0.5 * (lower + upper);
    let half = 0.5 * (upper - lower);
    let eval = |f: &mut F, x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadratureError::NonFinite { x })
        }
    };
    let fc = eval(f, center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut peak = fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        peak = peak.max(f1.abs()).max(f2.abs());
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Panel {
        lower,
        upper,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        peak,
    })
}

/// Integrates `f` over the finite interval `[lower, upper]`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    lower: f64,
    upper: f64,
    spec: &QuadratureSpec,
) -> Result<Integral, QuadratureError> {
    integrate_panels(&mut f, lower, upper, spec).map(|(integral, _)| integral)
}

fn integrate_panels<F: FnMut(f64) -> f64>(
    f: &mut F,
    lower: f64,
    upper: f64,
    spec: &QuadratureSpec,
) -> Result<(Integral, f64), QuadratureError> {
    let mut panels = vec![kronrod(f, lower, upper)?];
    let mut evaluations = 15;
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let peak = panels.iter().fold(0.0_f64, |m, p| m.max(p.peak));
        if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
            return Ok((
                Integral {
                    value,
                    abs_error: error,
                    evaluations,
                },
                peak,
            ));
        }
        if panels.len() >= spec.max_subdivisions {
            return Err(QuadratureError::SubdivisionLimit {
                value,
                abs_error: error,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.lower + p.upper);
        if mid <= p.lower || mid >= p.upper {
            // interval cannot be split any further in floating point
            return Err(QuadratureError::SubdivisionLimit {
                value,
                abs_error: error,
            });
        }
        panels.push(kronrod(f, p.lower, mid)?);
        panels.push(kronrod(f, mid, p.upper)?);
        evaluations += 30;
    }
}

/// Integrates `f` over `[lower, infinity)`.
///
/// `scale` is the width of the first panel; later panels double in width. The
/// range is truncated once a panel's largest sample is below `1e-16` of the
/// largest sample seen and its contribution is below the absolute tolerance or
/// `1e-16` of the running total.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    lower: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<Integral, QuadratureError> {
    let mut total = Integral {
        value: 0.0,
        abs_error: 0.0,
        evaluations: 0,
    };
    let mut peak = 0.0_f64;
    let mut start = lower;
    let mut width = scale;
    for _ in 0..200 {
        let (piece, piece_peak) = integrate_panels(&mut f, start, start + width, spec)?;
        total.value += piece.value;
        total.abs_error += piece.abs_error;
        total.evaluations += piece.evaluations;
        peak = peak.max(piece_peak);
        let tail_ok = piece_peak <= 1e-16 * peak
            && piece.value.abs() <= spec.abs_tol.max(1e-16 * total.value.abs());
        if tail_ok {
            return Ok(total);
        }
        start += width;
        width *= 2.0;
    }
    Err(QuadratureError::NoDecay { lower })
}
