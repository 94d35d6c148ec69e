//! Exponential integral E1 and its exponentially scaled form.

use super::SpecFunError;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Switch point between the power series and the continued fraction.
const SERIES_LIMIT: f64 = 1.0;

/// E1(x) = integral from x to infinity of e^-t / t.
///
/// Underflows to zero for x beyond roughly 740; use [`exp_scaled_e1`] there.
pub fn exp_e1(x: f64) -> Result<f64, SpecFunError> {
    check("exp_e1", x)?;
    if x <= SERIES_LIMIT {
        Ok(series(x))
    } else {
        Ok(continued_fraction(x) * (-x).exp())
    }
}

/// e^x * E1(x), evaluated without forming e^x for large arguments.
pub fn exp_scaled_e1(x: f64) -> Result<f64, SpecFunError> {
    check("exp_scaled_e1", x)?;
    if x <= SERIES_LIMIT {
        Ok(x.exp() * series(x))
    } else {
        Ok(continued_fraction(x))
    }
}

fn check(function: &'static str, x: f64) -> Result<(), SpecFunError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(SpecFunError::domain(function, x, "x > 0"))
    }
}

// -gamma - ln x + sum_{k>=1} (-1)^(k+1) x^k / (k k!)
fn series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        power *= -x / kf;
        let term = -power / kf;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - x.ln() + sum
}

// e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...))), modified Lentz.
fn continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_errors() {
        assert!(exp_e1(0.0).is_err());
        assert!(exp_e1(-1.0).is_err());
        assert!(exp_scaled_e1(f64::NAN).is_err());
    }

    #[test]
    fn known_value_at_one() {
        // E1(1) = 0.21938393439552027368...
        let v = exp_e1(1.0).unwrap();
        assert!((v - 0.219_383_934_395_520_27).abs() < 1e-15);
    }

    #[test]
    fn branches_meet() {
        let x = SERIES_LIMIT;
        let s = series(x) * x.exp();
        let cf = continued_fraction(x);
        assert!((s - cf).abs() < 1e-13 * s, "{s} vs {cf}");
    }

    #[test]
    fn sandwich_inequality() {
        for &x in &[0.1, 1.0, 10.0] {
            let e1 = exp_e1(x).unwrap();
            let lower = 0.5 * (-x).exp() * (1.0 + 2.0 / x).ln();
            let upper = (-x).exp() * (1.0 + 1.0 / x).ln();
            assert!(lower < e1 && e1 < upper, "x={x}");
        }
    }

    #[test]
    fn scaled_form_stays_finite() {
        let v = exp_scaled_e1(1000.0).unwrap();
        assert!(((v - 1e-3) / 1e-3).abs() < 0.01);
        assert!(exp_scaled_e1(700.0).unwrap().is_finite());
        let direct = 1.0_f64.exp() * exp_e1(1.0).unwrap();
        assert!((exp_scaled_e1(1.0).unwrap() - direct).abs() < 1e-12);
    }
}
