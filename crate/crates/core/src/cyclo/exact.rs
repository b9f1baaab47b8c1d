use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{cyclotomic_polynomial, invert_mod};
use super::{check_admissible, Backend, ScalarField};
use crate::error::{Error, Result};

/// An element of Q(ω) in canonical form: `(Σ num[j] ω^j) / den` with the
/// numerator reduced modulo the cyclotomic polynomial, `den > 0`, and the
/// content of `num` coprime to `den`. Equality is therefore structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloScalar {
    order: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycloScalar {
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Coefficients in the power basis {ω^j}, j < φ(order).
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub(crate) fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub(crate) fn denominator(&self) -> &BigInt {
        &self.den
    }

    fn normalized(order: u32, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        if num.iter().all(Zero::is_zero) {
            return CycloScalar {
                order,
                num,
                den: BigInt::one(),
            };
        }
        if den.is_negative() {
            den = -den;
            for c in &mut num {
                *c = -&*c;
            }
        }
        let mut g = den.clone();
        for c in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            for c in &mut num {
                *c = &*c / &g;
            }
            den /= &g;
        }
        CycloScalar { order, num, den }
    }

    pub fn to_wire(&self) -> CycloWire {
        CycloWire {
            order: self.order,
            coeffs: self
                .coeffs()
                .iter()
                .map(|c| format!("{}/{}", c.numer(), c.denom()))
                .collect(),
        }
    }
}

impl fmt::Debug for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        write!(f, "(")?;
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}·w^{j}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")?;
        if !self.den.is_one() {
            write!(f, "/{}", self.den)?;
        }
        Ok(())
    }
}

/// JSON form of an exact scalar: power-basis coefficients as `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycloWire {
    pub order: u32,
    pub coeffs: Vec<String>,
}

struct Inner {
    k: u32,
    l: u32,
    order: u32,
    degree: usize,
    /// Monic modulus, low degree first.
    modulus: Vec<BigInt>,
    /// Nonzero coefficients of the modulus below the leading term.
    tail: Vec<(usize, BigInt)>,
    /// ω^j reduced, for j in [0, order).
    powers: Vec<Vec<BigInt>>,
    inv_q_minus_qbar: CycloScalar,
    sqrt2: CycloScalar,
}

/// The cyclotomic field Q(ω) of order 8k with q = ω^{4l} singled out.
#[derive(Clone)]
pub struct CyclotomicField(Arc<Inner>);

impl fmt::Debug for CyclotomicField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CyclotomicField")
            .field("k", &self.0.k)
            .field("l", &self.0.l)
            .field("order", &self.0.order)
            .field("degree", &self.0.degree)
            .finish()
    }
}

impl CyclotomicField {
    /// Builds Q(e^{iπ/(4k)}) for q = e^{iπl/k}. Rejects `l >= k` and `gcd(l, k) != 1`.
    pub fn new(k: u32, l: u32) -> Result<Self> {
        check_admissible(k, l)?;
        let order = 8 * k;
        let modulus = cyclotomic_polynomial(order);
        let degree = modulus.len() - 1;
        let tail = modulus[..degree]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j, c.clone()))
            .collect::<Vec<_>>();

        let mut powers = Vec::with_capacity(order as usize);
        let mut cur = vec![BigInt::zero(); degree];
        cur[0] = BigInt::one();
        for _ in 0..order {
            powers.push(cur.clone());
            // multiply by ω: shift up, fold the overflow back through the modulus
            let top = cur[degree - 1].clone();
            for j in (1..degree).rev() {
                cur[j] = cur[j - 1].clone();
            }
            cur[0] = BigInt::zero();
            if !top.is_zero() {
                for (j, c) in &tail {
                    cur[*j] -= &top * c;
                }
            }
        }

        let placeholder = CycloScalar {
            order,
            num: vec![BigInt::zero(); degree],
            den: BigInt::one(),
        };
        let mut field = CyclotomicField(Arc::new(Inner {
            k,
            l,
            order,
            degree,
            modulus,
            tail,
            powers,
            inv_q_minus_qbar: placeholder.clone(),
            sqrt2: placeholder,
        }));

        let q_minus_qbar = field.sub(&field.q_pow(1), &field.q_pow(-1));
        let inv = field.inv(&q_minus_qbar)?;
        let sqrt2 = field.add(&field.omega_pow(k as i64), &field.omega_pow(-(k as i64)));
        let inner = Arc::get_mut(&mut field.0).expect("fresh field handle is unique");
        inner.inv_q_minus_qbar = inv;
        inner.sqrt2 = sqrt2;
        Ok(field)
    }

    pub fn order(&self) -> u32 {
        self.0.order
    }

    /// Degree of the field over Q, i.e. φ(8k).
    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.0.modulus
    }

    /// ω^j for any integer j.
    pub fn omega_pow(&self, j: i64) -> CycloScalar {
        let idx = j.rem_euclid(self.0.order as i64) as usize;
        CycloScalar {
            order: self.0.order,
            num: self.0.powers[idx].clone(),
            den: BigInt::one(),
        }
    }

    /// 1/(q - q̄), cached because every q-number divides by it.
    pub fn inv_q_minus_qbar(&self) -> &CycloScalar {
        &self.0.inv_q_minus_qbar
    }

    pub fn from_rational(&self, r: &BigRational) -> CycloScalar {
        let mut num = vec![BigInt::zero(); self.0.degree];
        num[0] = r.numer().clone();
        CycloScalar::normalized(self.0.order, num, r.denom().clone())
    }

    /// Builds an element from power-basis coefficients of any length, reducing as needed.
    pub fn from_coeffs(&self, coeffs: &[BigRational]) -> CycloScalar {
        let mut acc = self.zero();
        for (j, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = self.mul(&self.from_rational(c), &self.omega_pow(j as i64));
            acc = self.add(&acc, &term);
        }
        acc
    }

    pub fn from_wire(&self, wire: &CycloWire) -> Result<CycloScalar> {
        if wire.order != self.0.order {
            return Err(Error::Schema(format!(
                "scalar order {} does not match field order {}",
                wire.order, self.0.order
            )));
        }
        if wire.coeffs.len() != self.0.degree {
            return Err(Error::Schema(format!(
                "expected {} coefficients, got {}",
                self.0.degree,
                wire.coeffs.len()
            )));
        }
        let coeffs = wire
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.from_coeffs(&coeffs))
    }

    fn check(&self, a: &CycloScalar) {
        assert_eq!(
            a.order, self.0.order,
            "scalar from a field of order {} used in field of order {}",
            a.order, self.0.order
        );
    }

    fn reduce(&self, mut t: Vec<BigInt>) -> Vec<BigInt> {
        let d = self.0.degree;
        for i in (d..t.len()).rev() {
            if t[i].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut t[i]);
            for (j, mj) in &self.0.tail {
                t[i - d + j] -= &c * mj;
            }
        }
        t.truncate(d);
        t.resize(d, BigInt::zero());
        t
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Schema(format!("corrupted coefficient {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

impl ScalarField for CyclotomicField {
    type El = CycloScalar;

    fn backend(&self) -> Backend {
        Backend::Exact
    }

    fn k(&self) -> u32 {
        self.0.k
    }

    fn l(&self) -> u32 {
        self.0.l
    }

    fn zero(&self) -> CycloScalar {
        CycloScalar {
            order: self.0.order,
            num: vec![BigInt::zero(); self.0.degree],
            den: BigInt::one(),
        }
    }

    fn one(&self) -> CycloScalar {
        self.from_i64(1)
    }

    fn from_i64(&self, v: i64) -> CycloScalar {
        let mut num = vec![BigInt::zero(); self.0.degree];
        num[0] = BigInt::from(v);
        CycloScalar {
            order: self.0.order,
            num,
            den: BigInt::one(),
        }
    }

    fn add(&self, a: &CycloScalar, b: &CycloScalar) -> CycloScalar {
        self.check(a);
        self.check(b);
        if b.is_zero() {
            return a.clone();
        }
        if a.is_zero() {
            return b.clone();
        }
        if a.den == b.den {
            let num = a.num.iter().zip(&b.num).map(|(x, y)| x + y).collect();
            return CycloScalar::normalized(a.order, num, a.den.clone());
        }
        let l = a.den.lcm(&b.den);
        let fa = &l / &a.den;
        let fb = &l / &b.den;
        let num = a
            .num
            .iter()
            .zip(&b.num)
            .map(|(x, y)| x * &fa + y * &fb)
            .collect();
        CycloScalar::normalized(a.order, num, l)
    }

    fn sub(&self, a: &CycloScalar, b: &CycloScalar) -> CycloScalar {
        self.add(a, &self.neg(b))
    }

    fn mul(&self, a: &CycloScalar, b: &CycloScalar) -> CycloScalar {
        self.check(a);
        self.check(b);
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        let d = self.0.degree;
        let mut t = vec![BigInt::zero(); 2 * d - 1];
        for (i, x) in a.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.num.iter().enumerate() {
                if !y.is_zero() {
                    t[i + j] += x * y;
                }
            }
        }
        let num = self.reduce(t);
        CycloScalar::normalized(a.order, num, &a.den * &b.den)
    }

    fn neg(&self, a: &CycloScalar) -> CycloScalar {
        CycloScalar {
            order: a.order,
            num: a.num.iter().map(|c| -c).collect(),
            den: a.den.clone(),
        }
    }

    /// ω ↦ ω^{-1}.
    fn conj(&self, a: &CycloScalar) -> CycloScalar {
        self.check(a);
        let mut num = vec![BigInt::zero(); self.0.degree];
        let order = self.0.order as usize;
        for (j, c) in a.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let p = &self.0.powers[(order - j) % order];
            for (slot, pj) in num.iter_mut().zip(p) {
                if !pj.is_zero() {
                    *slot += c * pj;
                }
            }
        }
        CycloScalar::normalized(a.order, num, a.den.clone())
    }

    fn inv(&self, a: &CycloScalar) -> Result<CycloScalar> {
        self.check(a);
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let poly: Vec<BigRational> = a
            .num
            .iter()
            .map(|c| BigRational::new(c.clone(), BigInt::one()))
            .collect();
        let inv = invert_mod(&poly, &self.0.modulus).ok_or(Error::DivisionByZero)?;
        // (num/den)^{-1} = den * num^{-1}
        let den = BigRational::from_integer(a.den.clone());
        let scaled: Vec<BigRational> = inv.iter().map(|c| c * &den).collect();
        let common = scaled
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut num: Vec<BigInt> = scaled
            .iter()
            .map(|c| c.numer() * (&common / c.denom()))
            .collect();
        num.resize(self.0.degree, BigInt::zero());
        Ok(CycloScalar::normalized(a.order, num, common))
    }

    fn is_zero(&self, a: &CycloScalar) -> bool {
        a.is_zero()
    }

    /// Σ coeffs[j]·e^{iπj/(4k)}, summed in increasing j.
    fn to_complex(&self, a: &CycloScalar) -> Complex64 {
        let den = big_to_f64(&a.den);
        let step = std::f64::consts::PI / (4.0 * self.0.k as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in a.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let w = Complex64::from_polar(1.0, step * j as f64);
            acc += w * (big_to_f64(c) / den);
        }
        acc
    }

    /// q^{e/2} = ω^{2le}.
    fn q_half_pow(&self, e: i64) -> CycloScalar {
        self.omega_pow(2 * self.0.l as i64 * e)
    }

    fn inv_q_diff(&self) -> CycloScalar {
        self.0.inv_q_minus_qbar.clone()
    }

    fn sqrt2(&self) -> CycloScalar {
        self.0.sqrt2.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(k: u32, l: u32) -> CyclotomicField {
        CyclotomicField::new(k, l).unwrap()
    }

    #[test]
    fn rejects_inadmissible_parameters() {
        assert!(matches!(
            CyclotomicField::new(4, 2),
            Err(Error::Inadmissible { .. })
        ));
        assert!(CyclotomicField::new(3, 3).is_err());
        assert!(CyclotomicField::new(3, 5).is_err());
        assert!(CyclotomicField::new(3, 0).is_err());
    }

    #[test]
    fn q_is_i_at_k2() {
        let f = field(2, 1);
        assert_eq!(f.order(), 16);
        let q = f.to_complex(&f.q_pow(1));
        assert!((q - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn q_at_k5_l2() {
        let f = field(5, 2);
        let q = f.to_complex(&f.q_pow(1));
        let want = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 5.0);
        assert!((q - want).norm() < 1e-14);
    }

    #[test]
    fn basic_identities() {
        for (k, l) in [(2, 1), (3, 1), (5, 2), (4, 3)] {
            let f = field(k, l);
            let q = f.q_pow(1);
            let qbar = f.q_pow(-1);
            assert_eq!(f.mul(&q, &qbar), f.one());
            let half = f.q_half_pow(1);
            assert_eq!(f.mul(&half, &half), q);
            let s = f.sqrt2();
            assert_eq!(f.mul(&s, &s), f.from_i64(2));
            assert!((f.to_complex(&s).re - std::f64::consts::SQRT_2).abs() < 1e-12);
            assert!(f.to_complex(&s).im.abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_round_trip() {
        let f = field(5, 2);
        let a = f.add(&f.q_half_pow(3), &f.from_i64(7));
        let b = f.inv(&a).unwrap();
        assert_eq!(f.mul(&a, &b), f.one());
        assert_eq!(f.inv(&f.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn wire_round_trip_and_corruption() {
        let f = field(3, 1);
        let a = f.div(&f.q_half_pow(1), &f.from_i64(6)).unwrap();
        let w = a.to_wire();
        assert_eq!(f.from_wire(&w).unwrap(), a);
        let mut bad = w.clone();
        bad.coeffs[0] = "1/0".into();
        assert!(f.from_wire(&bad).is_err());
        bad.coeffs[0] = "abc".into();
        assert!(f.from_wire(&bad).is_err());
        let mut wrong_order = w;
        wrong_order.order = 16;
        assert!(f.from_wire(&wrong_order).is_err());
    }

    #[test]
    fn periodicity_of_q() {
        for (k, l) in [(2, 1), (3, 2), (5, 2), (7, 3)] {
            let f = field(k, l);
            assert_eq!(f.q_pow(2 * k as i64), f.one());
            let sign = if l % 2 == 0 { 1 } else { -1 };
            assert_eq!(f.q_pow(k as i64), f.from_i64(sign));
        }
    }
}
