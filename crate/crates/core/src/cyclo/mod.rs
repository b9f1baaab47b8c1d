//! Scalar backends.
//!
//! Every algebraic construction in this crate is generic over [`ScalarField`],
//! which is implemented twice:
//!
//! - [`CyclotomicField`]: exact arithmetic in Q(ω), ω = e^{iπ/(4k)} a primitive
//!   8k-th root of unity. The deformation parameter q = e^{iπl/k} = ω^{4l}, its
//!   square root ω^{2l}, and √2 = ω^k + ω^{-k} all live in this one field, so
//!   relation checks reduce to structural zero tests.
//! - [`ComplexField`]: IEEE double complex numbers, used for the orthonormal
//!   basis whose entries involve square roots of sines.

mod exact;
mod float;
mod poly;
mod sign;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use exact::{CycloScalar, CycloWire, CyclotomicField};
pub use float::{ComplexField, FloatScalar};
pub use sign::{certified_sign, Sign, FLOAT_SIGN_THRESHOLD};

use crate::error::{Error, Result};

/// Which arithmetic a matrix or report row was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::Float => f.write_str("float"),
        }
    }
}

/// Validates the root-of-unity parameters q = e^{iπl/k}: `1 <= l < k`, `gcd(l, k) = 1`.
pub fn check_admissible(k: u32, l: u32) -> Result<()> {
    let fail = |reason: &str| {
        Err(Error::Inadmissible {
            k,
            l,
            reason: reason.to_string(),
        })
    };
    if k < 2 {
        return fail("k must be at least 2");
    }
    if l == 0 {
        return fail("l must be positive");
    }
    if l >= k {
        return fail("l must be smaller than k");
    }
    if num_integer::gcd(k, l) != 1 {
        return fail("l and k must be coprime");
    }
    Ok(())
}

/// A field of scalars carrying the specialized deformation parameter q = e^{iπl/k}.
///
/// Elements are plain values; all arithmetic goes through the field handle,
/// which owns whatever context (reduction modulus, lookup tables) it needs.
pub trait ScalarField: Clone + Send + Sync {
    type El: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn backend(&self) -> Backend;
    fn k(&self) -> u32;
    fn l(&self) -> u32;

    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn from_i64(&self, v: i64) -> Self::El;

    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn neg(&self, a: &Self::El) -> Self::El;
    fn conj(&self, a: &Self::El) -> Self::El;
    fn inv(&self, a: &Self::El) -> Result<Self::El>;
    fn is_zero(&self, a: &Self::El) -> bool;
    fn to_complex(&self, a: &Self::El) -> Complex64;

    /// q^{e/2}; half-integer powers of q are what the Cartan generators need.
    fn q_half_pow(&self, e: i64) -> Self::El;

    /// The positive square root of two.
    fn sqrt2(&self) -> Self::El;

    fn q_pow(&self, e: i64) -> Self::El {
        self.q_half_pow(2 * e)
    }

    /// 1/(q - q̄). Admissibility keeps q off the real axis, so this never divides by zero.
    fn inv_q_diff(&self) -> Self::El {
        let d = self.sub(&self.q_pow(1), &self.q_pow(-1));
        self.inv(&d).expect("admissible q is not real")
    }

    fn magnitude(&self, a: &Self::El) -> f64 {
        self.to_complex(a).norm()
    }

    fn from_ratio(&self, num: i64, den: i64) -> Result<Self::El> {
        let d = self.inv(&self.from_i64(den))?;
        Ok(self.mul(&self.from_i64(num), &d))
    }

    fn div(&self, a: &Self::El, b: &Self::El) -> Result<Self::El> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn pow(&self, a: &Self::El, e: u32) -> Self::El {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    fn is_exact(&self) -> bool {
        self.backend() == Backend::Exact
    }
}
