//! Reference implementations shared by the integration tests. Each is written
//! independently of the library code it checks.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

const FRACTION_BITS: usize = 320;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Splits a finite positive `x` into `(mantissa, exponent)` with `x = mantissa * 2^exponent`.
fn decompose(x: f64) -> (u64, i64) {
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let fraction = bits & ((1 << 52) - 1);
    if biased == 0 {
        (fraction, -1074)
    } else {
        (fraction | (1 << 52), biased - 1075)
    }
}

fn fixed_to_f64(v: &BigInt) -> f64 {
    let keep = 100;
    let shifted: BigInt = v >> (FRACTION_BITS - keep);
    shifted.to_f64().expect("finite") / 2f64.powi(keep as i32)
}

/// `J0(x)` from its power series summed exactly in 320-bit fixed point on the
/// exact binary value of `x`.
pub fn j0_reference(x: f64) -> f64 {
    let x = x.abs();
    if x == 0.0 {
        return 1.0;
    }
    let (mantissa, exponent) = decompose(x);
    // q = x^2 / 4 in fixed point
    let shift = FRACTION_BITS as i64 + 2 * exponent - 2;
    let square = BigInt::from(mantissa) * BigInt::from(mantissa);
    let q = if shift >= 0 {
        square << shift as usize
    } else {
        square >> (-shift) as usize
    };
    let one = BigInt::from(1) << FRACTION_BITS;
    let mut term = one.clone();
    let mut sum = one;
    let mut k: u64 = 1;
    loop {
        term = (&term * &q) >> FRACTION_BITS;
        term /= BigInt::from(k * k);
        if term.is_zero() {
            break;
        }
        if k % 2 == 1 {
            sum -= &term;
        } else {
            sum += &term;
        }
        k += 1;
    }
    fixed_to_f64(&sum)
}

/// `E1(x)` from `-gamma - ln x + sum_{k>=1} (-1)^(k+1) x^k / (k k!)` with
/// compensated summation. Accurate for `x <= 2`.
pub fn e1_series(x: f64) -> f64 {
    let (mut sum, mut compensation) = (-EULER_GAMMA - x.ln(), 0.0);
    let mut power = 1.0; // (-1)^(k+1) x^k / k!
    for k in 1..200 {
        power *= if k == 1 { x } else { -x / k as f64 };
        let term = power / k as f64;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            compensation += (sum - t) + term;
        } else {
            compensation += (term - t) + sum;
        }
        sum = t;
        if term.abs() < 1e-20 * sum.abs() {
            break;
        }
    }
    sum + compensation
}

/// `e^x E1(x)` from the continued fraction
/// `1 / (x + 1/(1 + 1/(x + 2/(1 + 2/(x + ...)))))`, evaluated backward from a
/// deep truncation. Accurate for `x >= 1`.
pub fn scaled_e1_fraction(x: f64) -> f64 {
    let depth = 4000;
    let mut f = x;
    for k in (1..=depth).rev() {
        let k = k as f64;
        f = x + k / (1.0 + k / f);
    }
    1.0 / f
}

/// `E1(x)` choosing whichever reference is accurate at `x`.
pub fn e1_reference(x: f64) -> f64 {
    if x <= 1.5 {
        e1_series(x)
    } else {
        (-x).exp() * scaled_e1_fraction(x)
    }
}

/// Composite Gauss-Legendre rule with `panels` equal panels of 10 nodes.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, lower: f64, upper: f64, panels: usize) -> f64 {
    const NODES: [f64; 5] = [
        0.148_874_338_981_631_2,
        0.433_395_394_129_247_2,
        0.679_409_568_299_024_4,
        0.865_063_366_688_984_5,
        0.973_906_528_517_171_7,
    ];
    const WEIGHTS: [f64; 5] = [
        0.295_524_224_714_752_9,
        0.269_266_719_309_996_4,
        0.219_086_362_515_982,
        0.149_451_349_150_580_6,
        0.066_671_344_308_688_1,
    ];
    let h = (upper - lower) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = lower + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            s += w * (f(mid - half * x) + f(mid + half * x));
        }
        total += s * half;
    }
    total
}

/// `int_0^inf ln(x + a) e^(-b x) dx` by fixed composite Gauss-Legendre.
pub fn phi_reference(a: f64, b: f64) -> f64 {
    // substitute x = u / b and split where the integrand's scale changes
    let f = |u: f64| (u / b + a).ln() * (-u).exp() / b;
    gauss_legendre(f, 0.0, 1.0, 200)
        + gauss_legendre(f, 1.0, 50.0, 400)
        + gauss_legendre(f, 50.0, 800.0, 200)
}

/// `int_0^inf int_0^y ln(y + a) e^(-m (y - x)) e^(-n x) dx dy`, inner integral in closed form.
pub fn theta_reference(a: f64, m: f64, n: f64) -> f64 {
    // inner integral in closed form; outer by Gauss-Legendre after y = u / min(m, n)
    let s = m.min(n);
    let inner = |y: f64| {
        if (m - n).abs() < 1e-12 {
            y * (-m * y).exp()
        } else {
            ((-n * y).exp() - (-m * y).exp()) / (m - n)
        }
    };
    let f = |u: f64| {
        let y = u / s;
        (y + a).ln() * inner(y) / s
    };
    gauss_legendre(f, 0.0, 1.0, 200)
        + gauss_legendre(f, 1.0, 60.0, 800)
        + gauss_legendre(f, 60.0, 800.0, 200)
}
