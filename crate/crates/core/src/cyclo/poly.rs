//! Dense polynomial helpers over Z and Q, coefficient vectors low degree first.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn trim<T: Zero>(p: &mut Vec<T>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn mul_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division of integer polynomials where `den` is monic and divides `num`.
fn div_exact_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    debug_assert!(den[dd].is_one());
    let qlen = rem.len() - dd;
    let mut quot = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, d) in den.iter().enumerate() {
            rem[i + j] -= &c * d;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "non-exact polynomial division");
    quot
}

fn mobius(mut n: u32) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

fn x_pow_minus_one(d: u32) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(); d as usize + 1];
    p[0] = BigInt::from(-1);
    p[d as usize] = BigInt::one();
    p
}

/// The n-th cyclotomic polynomial as the Möbius product of the factors x^d - 1, d | n.
pub(crate) fn cyclotomic_polynomial(n: u32) -> Vec<BigInt> {
    let mut num = vec![BigInt::one()];
    let mut dens = Vec::new();
    for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        match mobius(n / d) {
            1 => num = mul_int(&num, &x_pow_minus_one(d)),
            -1 => dens.push(x_pow_minus_one(d)),
            _ => {}
        }
    }
    for den in dens {
        num = div_exact_monic(&num, &den);
    }
    trim(&mut num);
    num
}

type QPoly = Vec<BigRational>;

fn qdeg(p: &QPoly) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

fn qdivrem(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let db = qdeg(b).expect("division by zero polynomial");
    let mut rem = a.clone();
    let mut quot = vec![BigRational::zero(); a.len().max(1)];
    let lead = b[db].clone();
    while let Some(dr) = qdeg(&rem) {
        if dr < db {
            break;
        }
        let c = &rem[dr] / &lead;
        let shift = dr - db;
        for j in 0..=db {
            let t = &c * &b[j];
            rem[shift + j] -= t;
        }
        quot[shift] += c;
    }
    trim(&mut rem);
    (quot, rem)
}

fn qmul(a: &QPoly, b: &QPoly) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn qsub(a: &QPoly, b: &QPoly) -> QPoly {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(&mut out);
    out
}

/// Inverse of `a` modulo the irreducible `modulus` via the extended Euclidean algorithm.
/// Returns `None` when `a` is zero modulo `modulus`.
pub(crate) fn invert_mod(a: &QPoly, modulus: &[BigInt]) -> Option<QPoly> {
    let m: QPoly = modulus
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    let mut r0 = m.clone();
    let mut r1 = a.clone();
    trim(&mut r1);
    if r1.is_empty() {
        return None;
    }
    let mut t0: QPoly = Vec::new();
    let mut t1: QPoly = vec![BigRational::one()];
    while qdeg(&r1).is_some() {
        let (quot, rem) = qdivrem(&r0, &r1);
        let t2 = qsub(&t0, &qmul(&quot, &t1));
        r0 = std::mem::replace(&mut r1, rem);
        t0 = std::mem::replace(&mut t1, t2);
    }
    // gcd must be a nonzero constant for an invertible residue
    if qdeg(&r0) != Some(0) {
        return None;
    }
    let g = r0[0].clone();
    let mut inv: QPoly = t0.iter().map(|c| c / &g).collect();
    let (_, rem) = qdivrem(&inv, &m);
    inv = rem;
    Some(inv)
}

pub(crate) fn abs_sum(coeffs: &[BigInt]) -> BigInt {
    coeffs.iter().map(|c| c.abs()).sum()
}
