//! Certified sign of real cyclotomic numbers.
//!
//! The float embedding decides the sign when its magnitude clears a guard band.
//! Below the band the value Σ c_j cos(πj/4k) is re-evaluated in fixed-point
//! arithmetic with an explicit error bound, doubling the precision until the
//! enclosure excludes zero. A nonzero algebraic number always gets certified.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::poly::abs_sum;
use super::{CycloScalar, CyclotomicField, ScalarField};
use crate::error::{Error, Result};

/// Below this magnitude a float sign is never trusted.
pub const FLOAT_SIGN_THRESHOLD: f64 = 1e-9;

const MAX_BITS: u32 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl CyclotomicField {
    /// Sign of a real element, exact zero from canonical form.
    pub fn sign_of_real(&self, a: &CycloScalar) -> Result<Sign> {
        certified_sign(self, a, FLOAT_SIGN_THRESHOLD)
    }
}

/// Sign with a configurable float guard band; values whose embedding is
/// smaller than `threshold` (scaled by the coefficient mass) go through the
/// fixed-point refinement.
pub fn certified_sign(field: &CyclotomicField, a: &CycloScalar, threshold: f64) -> Result<Sign> {
    if *a != field.conj(a) {
        return Err(Error::NotReal);
    }
    if a.is_zero() {
        return Ok(Sign::Zero);
    }
    let approx = field.to_complex(a).re;
    let mass = abs_sum(a.numerators()).to_f64().unwrap_or(f64::INFINITY)
        / a.denominator().to_f64().unwrap_or(f64::INFINITY);
    let guard = threshold * mass.max(1.0);
    if approx.is_finite() && approx.abs() >= guard {
        return Ok(if approx > 0.0 { Sign::Positive } else { Sign::Negative });
    }
    refine(field, a)
}

fn refine(field: &CyclotomicField, a: &CycloScalar) -> Result<Sign> {
    let mut bits = 64;
    while bits <= MAX_BITS {
        if let Some(s) = fixed_point_sign(field, a, bits) {
            return Ok(s);
        }
        bits *= 2;
    }
    Err(Error::SignNotCertified { bits: MAX_BITS })
}

/// Fixed-point value `v / 2^bits` together with an error bound in ulps.
struct Fixed {
    v: BigInt,
    err: BigInt,
}

fn shr_floor(x: &BigInt, bits: u32) -> BigInt {
    // arithmetic shift on BigInt floors toward -inf
    x >> bits
}

/// arctan(1/x) · 2^bits by the alternating series; error bounded in ulps.
fn arctan_inv(x: u32, bits: u32) -> Fixed {
    let one = BigInt::one() << bits;
    let x2 = BigInt::from(x) * x;
    let mut power = &one / x; // 1/x^{2n+1}
    let mut sum = BigInt::zero();
    let mut terms = 0u64;
    let mut n: u64 = 0;
    loop {
        let term = &power / (2 * n + 1);
        if term.is_zero() {
            break;
        }
        if n % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        terms += 1;
        power /= &x2;
        n += 1;
    }
    // two truncating divisions per term, plus the tail (< 1 ulp)
    Fixed {
        v: sum,
        err: BigInt::from(2 * terms + 2),
    }
}

fn pi_fixed(bits: u32) -> Fixed {
    let a = arctan_inv(5, bits);
    let b = arctan_inv(239, bits);
    Fixed {
        v: a.v * 16 - b.v * 4,
        err: a.err * 16 + b.err * 4,
    }
}

/// cos(θ) with θ in fixed point, θ in [0, 2π).
///
/// The series is evaluated at the fixed-point value t of θ with a running
/// bound on accumulated rounding; |cos θ - cos t| <= |θ - t| adds θ's own error.
fn cos_fixed(theta: &Fixed, bits: u32) -> Fixed {
    let one = BigInt::one() << bits;
    let t2 = shr_floor(&(&theta.v * &theta.v), bits);
    let mut term = one.clone();
    let mut term_err = BigInt::zero();
    let mut sum = one;
    let mut err = BigInt::zero();
    let mut n: u64 = 0;
    let mut decreasing = false;
    loop {
        let c = (2 * n + 1) * (2 * n + 2);
        let next = shr_floor(&(&term * &t2), bits) / c;
        // propagate: e' = (e·(t2+1) + |term|) / (c·2^bits) + 3
        let prop = shr_floor(&(&term_err * (&t2 + 1u32) + term.abs()), bits) / c + 3u32;
        n += 1;
        if !decreasing && next.abs() < term.abs() {
            decreasing = true;
        }
        if n % 2 == 1 {
            sum -= &next;
        } else {
            sum += &next;
        }
        err += &prop;
        term = next;
        term_err = prop;
        if decreasing && term.abs() <= term_err {
            // alternating tail bounded by the magnitude of the next term
            err += term.abs() + &term_err + 1u32;
            break;
        }
    }
    Fixed {
        v: sum,
        err: err + &theta.err,
    }
}

fn fixed_point_sign(field: &CyclotomicField, a: &CycloScalar, bits: u32) -> Option<Sign> {
    let pi = pi_fixed(bits + 8);
    let order = field.order() as i64;
    let mut total = BigInt::zero();
    let mut total_err = BigInt::zero();
    for (j, c) in a.numerators().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        // θ_j = 2π j / order
        let theta = Fixed {
            v: (&pi.v * BigInt::from(2 * j as i64)) / order,
            err: (&pi.err * BigInt::from(2 * j as i64)) / order + 1,
        };
        let cos = cos_fixed(&theta, bits + 8);
        total += c * &cos.v;
        total_err += c.abs() * &cos.err;
    }
    match total.abs().cmp(&total_err) {
        Ordering::Greater => Some(if total.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_simple_signs() {
        let f = CyclotomicField::new(5, 2).unwrap();
        assert_eq!(f.sign_of_real(&f.zero()).unwrap(), Sign::Zero);
        assert_eq!(f.sign_of_real(&f.from_i64(3)).unwrap(), Sign::Positive);
        assert_eq!(f.sign_of_real(&f.from_i64(-3)).unwrap(), Sign::Negative);
    }

    #[test]
    fn non_real_rejected() {
        let f = CyclotomicField::new(3, 1).unwrap();
        assert_eq!(f.sign_of_real(&f.q_pow(1)), Err(Error::NotReal));
    }

    #[test]
    fn refinement_agrees_with_float_on_clear_cases() {
        // a threshold of 1e6 forces every value through the fixed-point path
        for (k, l) in [(3, 1), (5, 2), (7, 3)] {
            let f = CyclotomicField::new(k, l).unwrap();
            for e in 1..(2 * k as i64) {
                let x = f.add(&f.q_pow(e), &f.q_pow(-e));
                let expected = f.to_complex(&x).re;
                if expected.abs() < 1e-6 {
                    continue;
                }
                let got = certified_sign(&f, &x, 1e6).unwrap();
                let want = if expected > 0.0 { Sign::Positive } else { Sign::Negative };
                assert_eq!(got, want, "k={k} l={l} e={e}");
            }
        }
    }

    #[test]
    fn tiny_positive_value_is_certified() {
        // (2 - ω - ω^{-1})^4 ≈ (π/48)^8 ≈ 3e-10 at k=12: below the float guard band
        let f = CyclotomicField::new(12, 1).unwrap();
        let base = f.sub(&f.from_i64(2), &f.add(&f.omega_pow(1), &f.omega_pow(-1)));
        let tiny = f.pow(&base, 4);
        let approx = f.to_complex(&tiny).re;
        assert!(approx.abs() < FLOAT_SIGN_THRESHOLD);
        assert_eq!(f.sign_of_real(&tiny).unwrap(), Sign::Positive);
        assert_eq!(f.sign_of_real(&f.neg(&tiny)).unwrap(), Sign::Negative);
    }
}
