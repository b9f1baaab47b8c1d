//! q-combinatorics, Z2 grading, graded brackets and Cartan matrices.
//!
//! Mode indices in this module (and in every algebra module) are 1-based,
//! `1..=m+n`, with modes `1..=m` bosonic. Bosonic modes carry odd parity.

use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::cyclo::ScalarField;
use crate::error::{Error, Result};
use crate::matrix::OperatorMatrix;
use crate::report::{Checker, IndexTuple, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(b: u32) -> Self {
        if b % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> i64 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// (-1)^self.
    pub fn sign(self) -> i64 {
        1 - 2 * self.bit()
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit((self.bit() + rhs.bit()) as u32)
    }
}

impl Mul<u32> for Parity {
    type Output = Parity;
    fn mul(self, rhs: u32) -> Parity {
        Parity::from_bit(self.bit() as u32 * rhs)
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Split of the N = m + n modes into m bosonic and n fermionic ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradingMap {
    pub m: usize,
    pub n: usize,
}

impl GradingMap {
    pub fn new(m: usize, n: usize) -> Self {
        GradingMap { m, n }
    }

    pub fn modes(&self) -> usize {
        self.m + self.n
    }

    pub fn is_bosonic(&self, i: usize) -> bool {
        i >= 1 && i <= self.m
    }

    /// ⟨i⟩: odd for i <= m, even otherwise (including i = N + 1).
    pub fn parity(&self, i: usize) -> Parity {
        if i <= self.m {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// (-1)^⟨i⟩.
    pub fn sign(&self, i: usize) -> i64 {
        self.parity(i).sign()
    }

    /// θ_i = 1 - ⟨i⟩.
    pub fn theta(&self, i: usize) -> Parity {
        self.parity(i).flip()
    }

    /// (-1)^θ_i.
    pub fn theta_sign(&self, i: usize) -> i64 {
        self.theta(i).sign()
    }

    /// θ_ij = θ_i + θ_j mod 2.
    pub fn theta_pair(&self, i: usize, j: usize) -> Parity {
        self.theta(i) + self.theta(j)
    }
}

/// [x] = (q^x - q^{-x}) / (q - q̄).
pub fn q_bracket<F: ScalarField>(field: &F, x: i64) -> F::El {
    let num = field.sub(&field.q_pow(x), &field.q_pow(-x));
    field.mul(&num, &field.inv_q_diff())
}

/// [r]! = [r][r-1]…[1], with [0]! = 1.
pub fn q_factorial<F: ScalarField>(field: &F, r: u32) -> F::El {
    (1..=r as i64).fold(field.one(), |acc, x| field.mul(&acc, &q_bracket(field, x)))
}

/// c_q = 2 / (q^{1/2} + q̄^{1/2}).
pub fn c_q<F: ScalarField>(field: &F) -> F::El {
    let s = field.add(&field.q_half_pow(1), &field.q_half_pow(-1));
    let inv = field.inv(&s).expect("q^{1/2} + q̄^{1/2} vanishes only at q = -1");
    field.mul(&field.from_i64(2), &inv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketKind {
    /// ab - (-1)^{deg a · deg b} x ba
    Graded,
    /// ab - x ba
    Commutator,
    /// ab + x ba
    Anticommutator,
}

/// Bracket of two operators with optional twist x (default 1).
///
/// The graded variant needs both parities; the result parity is their sum
/// whenever both are known.
pub fn graded_bracket<F: ScalarField>(
    field: &F,
    a: &OperatorMatrix<F::El>,
    b: &OperatorMatrix<F::El>,
    twist: Option<&F::El>,
    kind: BracketKind,
) -> Result<OperatorMatrix<F::El>> {
    let parity = match (a.parity(), b.parity()) {
        (Some(pa), Some(pb)) => Some(pa + pb),
        _ if kind == BracketKind::Graded => return Err(Error::MissingParity),
        _ => None,
    };
    let sign: i64 = match (kind, a.parity(), b.parity()) {
        (BracketKind::Graded, Some(pa), Some(pb)) => -Parity::from_bit((pa.bit() * pb.bit()) as u32).sign(),
        (BracketKind::Anticommutator, _, _) => 1,
        _ => -1,
    };
    let ab = a.mul(field, b)?;
    let ba = b.mul(field, a)?;
    let coeff = match twist {
        Some(x) => field.mul(x, &field.from_i64(sign)),
        None => field.from_i64(sign),
    };
    Ok(ab.add(field, &ba.scale(field, &coeff))?.with_parity(parity))
}

/// [[a, b]] (untwisted graded bracket).
pub fn gbracket<F: ScalarField>(field: &F, a: &OperatorMatrix<F::El>, b: &OperatorMatrix<F::El>) -> Result<OperatorMatrix<F::El>> {
    graded_bracket(field, a, b, None, BracketKind::Graded)
}

/// [[a, b]]_x.
pub fn gbracket_x<F: ScalarField>(
    field: &F,
    a: &OperatorMatrix<F::El>,
    b: &OperatorMatrix<F::El>,
    x: &F::El,
) -> Result<OperatorMatrix<F::El>> {
    graded_bracket(field, a, b, Some(x), BracketKind::Graded)
}

/// [a, b]_x = ab - x ba, parity-blind.
pub fn twisted<F: ScalarField>(field: &F, a: &OperatorMatrix<F::El>, b: &OperatorMatrix<F::El>, x: &F::El) -> Result<OperatorMatrix<F::El>> {
    graded_bracket(field, a, b, Some(x), BracketKind::Commutator)
}

/// [a, b] = ab - ba.
pub fn commutator<F: ScalarField>(field: &F, a: &OperatorMatrix<F::El>, b: &OperatorMatrix<F::El>) -> Result<OperatorMatrix<F::El>> {
    graded_bracket(field, a, b, None, BracketKind::Commutator)
}

/// {a, b} = ab + ba.
pub fn anticommutator<F: ScalarField>(field: &F, a: &OperatorMatrix<F::El>, b: &OperatorMatrix<F::El>) -> Result<OperatorMatrix<F::El>> {
    graded_bracket(field, a, b, None, BracketKind::Anticommutator)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CartanKind {
    Osp,
    Sl,
}

/// Integer Cartan matrix with 1-based accessors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanMatrix {
    pub kind: CartanKind,
    pub entries: Vec<Vec<i64>>,
}

impl CartanMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i - 1][j - 1]
    }

    pub fn is_symmetric(&self) -> bool {
        let s = self.size();
        (0..s).all(|i| (0..s).all(|j| self.entries[i][j] == self.entries[j][i]))
    }
}

fn delta(a: usize, b: usize) -> i64 {
    i64::from(a == b)
}

/// The N×N symmetric Cartan matrix of osp(2n+1|2m).
///
/// a_ij = (-1)^⟨j⟩ δ_{i+1,j} + (-1)^⟨i⟩ δ_{i,j+1} - [(-1)^⟨j+1⟩ + (-1)^⟨j⟩] δ_ij + δ_{iN} δ_{jN}.
pub fn build_cartan_osp(grading: GradingMap) -> Result<CartanMatrix> {
    let size = grading.modes();
    if size == 0 {
        return Err(Error::CartanSize { min: 1, got: 0 });
    }
    let g = &grading;
    let entries = (1..=size)
        .map(|i| {
            (1..=size)
                .map(|j| {
                    g.sign(j) * delta(i + 1, j) + g.sign(i) * delta(i, j + 1)
                        - (g.sign(j + 1) + g.sign(j)) * delta(i, j)
                        + delta(i, size) * delta(j, size)
                })
                .collect()
        })
        .collect();
    Ok(CartanMatrix {
        kind: CartanKind::Osp,
        entries,
    })
}

/// The (N-1)×(N-1) Cartan matrix of sl(m|n).
///
/// α_ij = (1 + (-1)^θ_{i,i+1}) δ_ij - (-1)^θ_{i,i+1} δ_{i,j-1} - δ_{i-1,j}.
pub fn build_cartan_sl(grading: GradingMap) -> Result<CartanMatrix> {
    let modes = grading.modes();
    if modes < 2 {
        return Err(Error::CartanSize { min: 2, got: modes });
    }
    let size = modes - 1;
    let entries = (1..=size)
        .map(|i| {
            let t = grading.theta_pair(i, i + 1).sign();
            (1..=size)
                .map(|j| (1 + t) * delta(i, j) - t * delta(i + 1, j) - delta(i, j + 1))
                .collect()
        })
        .collect();
    Ok(CartanMatrix {
        kind: CartanKind::Sl,
        entries,
    })
}

/// Checks the two q-number sum identities for every n in `0..=max_n`:
/// `1 + Σ_{s=1..n} (q^{2s} + q̄^{2s}) = [2n+1]` and `Σ_{s=0..n} (q^{2s+1} + q̄^{2s+1}) = [2n+2]`.
pub fn verify_sum_identities<F: ScalarField>(field: &F, max_n: u32, tolerance: f64) -> VerificationReport {
    let mut ch = Checker::new(field, "qcore", tolerance);
    for n in 0..=max_n as i64 {
        let even = (1..=n).fold(field.one(), |acc, s| {
            field.add(&acc, &field.add(&field.q_pow(2 * s), &field.q_pow(-2 * s)))
        });
        ch.scalar_equal("qcore.even_power_sum", IndexTuple::new().at("n", n), &even, &q_bracket(field, 2 * n + 1));
        let odd = (0..=n).fold(field.zero(), |acc, s| {
            field.add(&acc, &field.add(&field.q_pow(2 * s + 1), &field.q_pow(-2 * s - 1)))
        });
        ch.scalar_equal("qcore.odd_power_sum", IndexTuple::new().at("n", n), &odd, &q_bracket(field, 2 * n + 2));
    }
    ch.finish()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::cyclo::{ComplexField, CyclotomicField, Sign};
    use crate::report::DEFAULT_TOLERANCE;

    #[test]
    fn bracket_values() {
        let f = CyclotomicField::new(5, 2).unwrap();
        assert_eq!(q_bracket(&f, 0), f.zero());
        assert_eq!(q_bracket(&f, 1), f.one());
        assert_eq!(q_bracket(&f, 5), f.zero());
        for x in -12..12 {
            assert_eq!(q_bracket(&f, x), f.neg(&q_bracket(&f, -x)));
            let b = q_bracket(&f, x);
            assert_eq!(b, f.conj(&b));
        }
    }

    #[test]
    fn factorial_values() {
        let f = CyclotomicField::new(5, 1).unwrap();
        assert_eq!(q_factorial(&f, 0), f.one());
        assert_eq!(q_factorial(&f, 1), f.one());
        let two = f.to_complex(&q_factorial(&f, 2));
        assert!((two.re - 2.0 * (PI / 5.0).cos()).abs() < 1e-12);
        assert!(two.im.abs() < 1e-12);
        // [k]! contains [k] = 0
        assert_eq!(q_factorial(&f, 5), f.zero());
    }

    #[test]
    fn c_q_values() {
        let f = CyclotomicField::new(2, 1).unwrap();
        assert_eq!(c_q(&f), f.sqrt2());
        let g = CyclotomicField::new(3, 1).unwrap();
        let v = g.to_complex(&c_q(&g));
        assert!((v.re - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        for (k, l) in [(2, 1), (3, 2), (5, 3), (7, 6), (8, 5)] {
            let f = CyclotomicField::new(k, l).unwrap();
            let c = c_q(&f);
            assert_eq!(c, f.conj(&c));
            assert_eq!(f.sign_of_real(&c).unwrap(), Sign::Positive);
            let want = 1.0 / (PI * l as f64 / (2.0 * k as f64)).cos();
            assert!((f.to_complex(&c).re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn sum_identities_exact() {
        for (k, l) in [(2, 1), (3, 2), (5, 2)] {
            let f = CyclotomicField::new(k, l).unwrap();
            let r = verify_sum_identities(&f, 2 * k, DEFAULT_TOLERANCE);
            assert!(r.all_passed(), "{:?}", r.failures().next());
        }
    }

    #[test]
    fn osp_cartan_small_cases() {
        // hand-evaluated entries
        let one_one = build_cartan_osp(GradingMap::new(1, 1)).unwrap();
        assert_eq!(one_one.entries, vec![vec![0, 1], vec![1, -1]]);
        let fermi = build_cartan_osp(GradingMap::new(0, 2)).unwrap();
        assert_eq!(fermi.entries, vec![vec![-2, 1], vec![1, -1]]);
        let bose = build_cartan_osp(GradingMap::new(2, 0)).unwrap();
        assert_eq!(bose.entries, vec![vec![2, -1], vec![-1, 1]]);
        let single = build_cartan_osp(GradingMap::new(1, 0)).unwrap();
        assert_eq!(single.entries, vec![vec![1]]);
        assert!(matches!(build_cartan_osp(GradingMap::new(0, 0)), Err(Error::CartanSize { .. })));
    }

    #[test]
    fn osp_cartan_structure() {
        for m in 0..=6 {
            for n in 0..=(6 - m) {
                if m + n == 0 {
                    continue;
                }
                let a = build_cartan_osp(GradingMap::new(m, n)).unwrap();
                assert!(a.is_symmetric(), "m={m} n={n}");
                if m >= 1 && n >= 1 {
                    assert_eq!(a.get(m, m), 0);
                }
            }
        }
    }

    #[test]
    fn sl_cartan_small_cases() {
        let a = build_cartan_sl(GradingMap::new(2, 1)).unwrap();
        assert_eq!(a.entries, vec![vec![2, -1], vec![-1, 0]]);
        let b = build_cartan_sl(GradingMap::new(1, 1)).unwrap();
        assert_eq!(b.entries, vec![vec![0]]);
        let c = build_cartan_sl(GradingMap::new(0, 3)).unwrap();
        assert_eq!(c.entries, vec![vec![2, -1], vec![-1, 2]]);
        assert!(build_cartan_sl(GradingMap::new(1, 0)).is_err());
    }

    #[test]
    fn bracket_variants() {
        let f = ComplexField::new(3, 1).unwrap();
        let one = f.one();
        let a = OperatorMatrix::from_triplets(&f, 2, Some(Parity::Odd), [(0, 1, one), (1, 0, one)]);
        let anti = graded_bracket(&f, &a, &a, None, BracketKind::Anticommutator).unwrap();
        let twice_sq = a.mul(&f, &a).unwrap().scale(&f, &f.from_i64(2));
        assert_eq!(anti, twice_sq);
        // graded bracket of two odd operators is the anticommutator
        assert_eq!(gbracket(&f, &a, &a).unwrap(), twice_sq);
        assert_eq!(anti.parity(), Some(Parity::Even));
        let even = OperatorMatrix::identity(&f, 2);
        assert!(gbracket(&f, &even, &a).unwrap().is_zero());
        let untagged = a.clone().with_parity(None);
        assert_eq!(gbracket(&f, &untagged, &a), Err(Error::MissingParity));
        assert!(commutator(&f, &untagged, &a).unwrap().is_zero());
    }

    #[test]
    fn grading_functions() {
        let g = GradingMap::new(2, 1);
        assert_eq!(g.parity(1), Parity::Odd);
        assert_eq!(g.parity(3), Parity::Even);
        assert_eq!(g.parity(4), Parity::Even);
        assert_eq!(g.theta(1), Parity::Even);
        assert_eq!(g.theta_pair(2, 3), Parity::Odd);
        assert_eq!(g.theta_pair(1, 2), Parity::Even);
    }
}
