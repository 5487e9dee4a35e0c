//! Exact rational arithmetic helpers.
//!
//! Exponent sharpness assertions and the recursion-vs-closed-form identity
//! checks must hold exactly, not merely to float tolerance. Whenever `p` and
//! `q` admit a small rational representation we carry a [`BigRational`]
//! alongside the float value.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest denominator considered when recovering a rational from a float.
pub const MAX_DENOMINATOR: i64 = 1_000_000;

/// Build a `BigRational` from an integer pair.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Recover a small exact rational from `x` by continued fractions.
///
/// Returns `None` when no `p/q` with `q <= MAX_DENOMINATOR` reproduces `x`
/// within `1e-12 * max(1, |x|)`.
pub fn approx_rational(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let tol = 1e-12 * x.abs().max(1.0);
    // Continued-fraction convergents p_k/q_k of |x|.
    let target = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (1i128, 0i128, target.floor() as i128, 1i128);
    let mut frac = target - target.floor();
    for _ in 0..64 {
        let approx = p1 as f64 / q1 as f64;
        if (approx - target).abs() <= tol {
            break;
        }
        if frac.abs() < 1e-18 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let a = a as i128;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > MAX_DENOMINATOR as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    let approx = p1 as f64 / q1 as f64;
    if (approx - target).abs() <= tol && q1 <= MAX_DENOMINATOR as i128 {
        let sign = if x < 0.0 { -1 } else { 1 };
        Some(BigRational::new(
            BigInt::from(sign * p1 as i64),
            BigInt::from(q1 as i64),
        ))
    } else {
        None
    }
}

/// Lossy conversion back to `f64`.
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Out-of-range ratios only appear in intermediate identities; fall
        // back to the sign-correct infinity.
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact `r^j` for non-negative integer `j`.
pub fn pow_usize(r: &BigRational, j: usize) -> BigRational {
    let mut acc = BigRational::one();
    let mut base = r.clone();
    let mut e = j;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base.clone();
        }
        base = base.clone() * base;
        e >>= 1;
    }
    acc
}

/// Exact minimum of two rationals.
pub fn min(a: BigRational, b: BigRational) -> BigRational {
    if a <= b {
        a
    } else {
        b
    }
}

/// Exact maximum of two rationals.
pub fn max(a: BigRational, b: BigRational) -> BigRational {
    if a >= b {
        a
    } else {
        b
    }
}

/// True when `r` is strictly positive.
pub fn is_positive(r: &BigRational) -> bool {
    r > &BigRational::zero()
}
