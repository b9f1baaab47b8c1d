use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::{check_admissible, Backend, ScalarField};
use crate::error::{Error, Result};

/// Double-precision complex scalar.
pub type FloatScalar = Complex64;

/// Complex floating-point backend with q = e^{iπl/k}.
///
/// Powers of q^{1/2} come from a table indexed modulo 4k, with the quarter
/// turns stored as exact ±1, ±i so that e.g. q^k = (-1)^l has no rounding.
#[derive(Debug, Clone)]
pub struct ComplexField {
    k: u32,
    l: u32,
    half_powers: Arc<Vec<Complex64>>,
}

impl ComplexField {
    pub fn new(k: u32, l: u32) -> Result<Self> {
        check_admissible(k, l)?;
        let period = 4 * k as usize;
        let half_powers = (0..period)
            .map(|j| {
                if j % k as usize == 0 {
                    match (j / k as usize) % 4 {
                        0 => Complex64::new(1.0, 0.0),
                        1 => Complex64::new(0.0, 1.0),
                        2 => Complex64::new(-1.0, 0.0),
                        _ => Complex64::new(0.0, -1.0),
                    }
                } else {
                    Complex64::from_polar(1.0, PI * j as f64 / (2.0 * k as f64))
                }
            })
            .collect();
        Ok(ComplexField {
            k,
            l,
            half_powers: Arc::new(half_powers),
        })
    }
}

impl ScalarField for ComplexField {
    type El = FloatScalar;

    fn backend(&self) -> Backend {
        Backend::Float
    }

    fn k(&self) -> u32 {
        self.k
    }

    fn l(&self) -> u32 {
        self.l
    }

    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn one(&self) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn from_i64(&self, v: i64) -> Complex64 {
        Complex64::new(v as f64, 0.0)
    }

    fn add(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a + b
    }

    fn sub(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a - b
    }

    fn mul(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a * b
    }

    fn neg(&self, a: &Complex64) -> Complex64 {
        -a
    }

    fn conj(&self, a: &Complex64) -> Complex64 {
        a.conj()
    }

    fn inv(&self, a: &Complex64) -> Result<Complex64> {
        if *a == self.zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(a.inv())
    }

    fn is_zero(&self, a: &Complex64) -> bool {
        a.re == 0.0 && a.im == 0.0
    }

    fn to_complex(&self, a: &Complex64) -> Complex64 {
        *a
    }

    fn q_half_pow(&self, e: i64) -> Complex64 {
        let period = 4 * self.k as i64;
        let idx = (e * self.l as i64).rem_euclid(period) as usize;
        self.half_powers[idx]
    }

    fn sqrt2(&self) -> Complex64 {
        Complex64::new(std::f64::consts::SQRT_2, 0.0)
    }
}
