//! The contravariant Hermitian form on the raw Fock basis.
//!
//! Distinct basis vectors are orthogonal and
//! `(|r⟩, |r⟩) = c_q^{r_1+…+r_N} [r_1]! … [r_m]!`, so only the diagonal is stored.
//! The form is antilinear in its first argument.

use num_complex::Complex64;
use serde::Serialize;

use crate::clifford::{BasisKind, CliffordBundle, Ladder};
use crate::cyclo::{ComplexField, CyclotomicField, ScalarField, Sign};
use crate::error::{Error, Result};
use crate::fock::{FockModule, OccupationVector};
use crate::matrix::{OperatorMatrix, SparseVec};
use crate::qcore::{c_q, q_factorial};
use crate::report::{Checker, IndexTuple, VerificationReport};

/// Diagonal of the Gram matrix, indexed by basis rank.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix<E> {
    diagonal: Vec<E>,
}

impl<E: Clone + PartialEq> GramMatrix<E> {
    pub fn diagonal(&self) -> &[E] {
        &self.diagonal
    }

    pub fn get(&self, index: usize) -> &E {
        &self.diagonal[index]
    }

    pub fn as_matrix<F: ScalarField<El = E>>(&self, field: &F) -> OperatorMatrix<E> {
        OperatorMatrix::diagonal(field, self.diagonal.clone())
    }
}

/// Closed-form Gram diagonal.
pub fn build_gram<F: ScalarField>(field: &F, module: &FockModule) -> GramMatrix<F::El> {
    let cq = c_q(field);
    let top = (1..=module.modes()).map(|i| module.max_occupation(i)).max().unwrap_or(0);
    let factorials: Vec<F::El> = (0..=top).map(|r| q_factorial(field, r)).collect();
    let diagonal = module
        .basis()
        .iter()
        .map(|v| {
            let bos = v.0.iter().take(module.m()).fold(field.one(), |acc, &r| field.mul(&acc, &factorials[r as usize]));
            field.mul(&field.pow(&cq, v.total()), &bos)
        })
        .collect();
    GramMatrix { diagonal }
}

/// (v, w) = Σ conj(v_j) G_j w_j for sparse vectors.
pub fn pairing<F: ScalarField>(field: &F, gram: &GramMatrix<F::El>, v: &SparseVec<F::El>, w: &SparseVec<F::El>) -> F::El {
    let mut acc = field.zero();
    let (mut a, mut b) = (0, 0);
    while a < v.len() && b < w.len() {
        match v[a].0.cmp(&w[b].0) {
            std::cmp::Ordering::Less => a += 1,
            std::cmp::Ordering::Greater => b += 1,
            std::cmp::Ordering::Equal => {
                let t = field.mul(&field.mul(&field.conj(&v[a].1), gram.get(v[a].0)), &w[b].1);
                acc = field.add(&acc, &t);
                a += 1;
                b += 1;
            }
        }
    }
    acc
}

/// (|r⟩, |s⟩) from the defining properties alone: ⟨0|0⟩ = 1 and c_i^+ adjoint to c_i^-.
///
/// Since |r⟩ = (c_1^+)^{r_1}…(c_N^+)^{r_N}|0⟩, the pairing equals the vacuum
/// component of (c_N^-)^{r_N}…(c_1^-)^{r_1}|s⟩. Independent of the closed form.
pub fn form_by_annihilation<F: ScalarField>(bundle: &CliffordBundle<F>, r: &OccupationVector, s: &OccupationVector) -> Result<F::El> {
    let f = bundle.field();
    let module = bundle.module();
    let mut v: SparseVec<F::El> = vec![(module.rank(s)?, f.one())];
    for i in 1..=bundle.modes() {
        for _ in 0..r.get(i) {
            v = bundle.c(i, Ladder::Lower).apply(f, &v);
        }
    }
    Ok(v.into_iter().find(|(j, _)| *j == 0).map(|(_, x)| x).unwrap_or_else(|| f.zero()))
}

/// Checks X^† G = G ω(X) for every generator, where ω swaps c_i^+ and c_i^- and fixes N_i.
pub fn verify_contravariance<F: ScalarField>(bundle: &CliffordBundle<F>, gram: &GramMatrix<F::El>, tolerance: f64) -> VerificationReport {
    let f = bundle.field();
    let g = gram.as_matrix(f);
    let mut ch = Checker::new(f, "gram", tolerance);
    let residual = |x: &OperatorMatrix<F::El>, y: &OperatorMatrix<F::El>| {
        let lhs = x.adjoint(f).mul(f, &g).expect("same dimension");
        let rhs = g.mul(f, y).expect("same dimension");
        lhs.sub(f, &rhs).expect("same dimension")
    };
    for i in 1..=bundle.modes() {
        for lad in Ladder::BOTH {
            let r = residual(bundle.c(i, lad), bundle.c(i, lad.opposite()));
            ch.zero("gram.contravariance", IndexTuple::new().at("i", i as i64).sign("sign", lad.sign()), &r);
        }
        let r = residual(bundle.number(i), bundle.number(i));
        ch.zero("gram.contravariance_number", IndexTuple::new().at("i", i as i64), &r);
    }
    ch.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityRow {
    pub occupation: OccupationVector,
    pub sign: Sign,
    pub float_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityAnalysis {
    pub positive_definite: bool,
    pub first_negative: Option<OccupationVector>,
    pub rows: Vec<PositivityRow>,
}

/// Certified sign of every Gram norm.
pub fn positivity_analysis(field: &CyclotomicField, module: &FockModule, gram: &GramMatrix<crate::cyclo::CycloScalar>) -> Result<PositivityAnalysis> {
    let mut rows = Vec::with_capacity(module.dim());
    for (v, g) in module.basis().iter().zip(gram.diagonal()) {
        let sign = field.sign_of_real(g)?;
        rows.push(PositivityRow {
            occupation: v.clone(),
            sign,
            float_value: field.to_complex(g).re,
        });
    }
    let first_negative = rows.iter().find(|r| r.sign == Sign::Negative).map(|r| r.occupation.clone());
    let positive_definite = rows.iter().all(|r| r.sign == Sign::Positive);
    Ok(PositivityAnalysis {
        positive_definite,
        first_negative,
        rows,
    })
}

/// Orthonormal basis checks: (c_i^+)^† = c_i^- and N_i^† = N_i entrywise.
pub fn orthonormality_check(bundle: &CliffordBundle<ComplexField>, tolerance: f64) -> Result<VerificationReport> {
    if bundle.basis() != BasisKind::Orthonormal {
        return Err(Error::Unsupported("orthonormality check needs the orthonormal basis".into()));
    }
    let f = bundle.field();
    let mut ch = Checker::new(f, "gram", tolerance);
    for i in 1..=bundle.modes() {
        let idx = IndexTuple::new().at("i", i as i64);
        let up = bundle.c(i, Ladder::Raise);
        ch.equal("gram.adjoint_reciprocity", idx.clone(), &up.adjoint(f), bundle.c(i, Ladder::Lower));
        ch.equal("gram.number_hermitian", idx, &bundle.number(i).adjoint(f), bundle.number(i));
    }
    Ok(ch.finish())
}

/// The norm of |1,1,0,…⟩ evaluated two ways: moving c_1^+ across first, or
/// reordering c_1^+c_2^+ into c_2^+c_1^+ first (which brings in |q|²).
/// Both must equal the closed form. Needs two bosonic modes.
pub fn route_consistency<F: ScalarField>(bundle: &CliffordBundle<F>, gram: &GramMatrix<F::El>, tolerance: f64) -> Result<VerificationReport> {
    let module = bundle.module();
    if module.m() < 2 {
        return Err(Error::Unsupported("route consistency needs two bosonic modes".into()));
    }
    let f = bundle.field();
    let vac: SparseVec<F::El> = vec![(0, f.one())];
    let c = |i: usize, l: Ladder, v: &SparseVec<F::El>| bundle.c(i, l).apply(f, v);
    let mut target = OccupationVector::vacuum(module.modes());
    target.0[0] = 1;
    target.0[1] = 1;
    let closed = gram.get(module.rank(&target)?).clone();

    let two = c(2, Ladder::Raise, &vac);
    let via_first = pairing(f, gram, &two, &c(1, Ladder::Lower, &c(1, Ladder::Raise, &two)));

    let one = c(1, Ladder::Raise, &vac);
    let q = f.q_pow(1);
    let modulus = f.mul(&f.conj(&q), &q);
    let via_second = f.mul(&modulus, &pairing(f, gram, &one, &c(2, Ladder::Lower, &c(2, Ladder::Raise, &one))));

    let mut ch = Checker::new(f, "gram", tolerance);
    ch.scalar_equal("gram.route_agreement", IndexTuple::new(), &via_first, &via_second);
    ch.scalar_equal("gram.route_closed_form", IndexTuple::new(), &via_first, &closed);
    Ok(ch.finish())
}

/// √G for a positive definite exact Gram diagonal, as floats.
pub fn normalization_diagonal(field: &CyclotomicField, gram: &GramMatrix<crate::cyclo::CycloScalar>) -> Result<Vec<f64>> {
    gram.diagonal()
        .iter()
        .map(|g| match field.sign_of_real(g)? {
            Sign::Positive => Ok(field.to_complex(g).re.sqrt()),
            _ => Err(Error::Unsupported("normalization needs a positive definite form".into())),
        })
        .collect()
}

/// X ↦ D X D^{-1}: raw-basis matrix expressed in the orthonormal basis.
pub fn to_orthonormal(m: &OperatorMatrix<Complex64>, sqrt_gram: &[f64]) -> OperatorMatrix<Complex64> {
    let field = ComplexField::new(2, 1).expect("fixed admissible parameters");
    let left: Vec<Complex64> = sqrt_gram.iter().map(|d| Complex64::new(*d, 0.0)).collect();
    let right: Vec<Complex64> = sqrt_gram.iter().map(|d| Complex64::new(1.0 / d, 0.0)).collect();
    m.conjugate_diagonal(&field, &left, &right)
}

/// Full Gram suite for an exact raw bundle: contravariance, nondegeneracy,
/// the vacuum normalization, and (with two bosonic modes) route agreement.
pub fn verify_gram<F: ScalarField>(bundle: &CliffordBundle<F>, tolerance: f64) -> VerificationReport {
    let f = bundle.field();
    let gram = build_gram(f, bundle.module());
    let mut report = verify_contravariance(bundle, &gram, tolerance);
    let mut ch = Checker::new(f, "gram", tolerance);
    ch.scalar_equal("gram.vacuum_norm", IndexTuple::new(), gram.get(0), &f.one());
    for (j, g) in gram.diagonal().iter().enumerate() {
        ch.holds("gram.nondegenerate", IndexTuple::new().at("index", j as i64), !f.is_zero(g));
    }
    report.merge(ch.finish());
    if bundle.module().m() >= 2 {
        report.merge(route_consistency(bundle, &gram, tolerance).expect("two bosonic modes"));
    }
    report.sort();
    report
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::matrix::max_difference;
    use crate::report::DEFAULT_TOLERANCE;

    fn bundle(m: usize, n: usize, k: u32, l: u32) -> CliffordBundle<CyclotomicField> {
        CliffordBundle::raw(CyclotomicField::new(k, l).unwrap(), FockModule::new(m, n, k, l).unwrap()).unwrap()
    }

    fn occ(r: &[u32]) -> OccupationVector {
        OccupationVector(r.to_vec())
    }

    #[test]
    fn closed_form_values() {
        let b = bundle(1, 1, 5, 1);
        let f = b.field();
        let g = build_gram(f, b.module());
        assert_eq!(g.get(0), &f.one());
        let cq = c_q(f);
        assert_eq!(g.get(b.module().rank(&occ(&[1, 0])).unwrap()), &cq);
        let two = f.to_complex(g.get(b.module().rank(&occ(&[2, 0])).unwrap())).re;
        let cqf = 1.0 / (PI / 10.0).cos();
        assert!((two - cqf * cqf * 2.0 * (PI / 5.0).cos()).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_annihilation_oracle() {
        for (m, n, k, l) in [(1, 1, 3, 1), (2, 1, 3, 2), (1, 2, 4, 3)] {
            let b = bundle(m, n, k, l);
            let f = b.field();
            let g = build_gram(f, b.module());
            for r in b.module().basis() {
                for s in b.module().basis() {
                    let got = form_by_annihilation(&b, r, s).unwrap();
                    if r == s {
                        assert_eq!(&got, g.get(b.module().rank(r).unwrap()), "{r} at ({m},{n},{k},{l})");
                    } else {
                        assert!(f.is_zero(&got), "{r} vs {s}");
                    }
                }
            }
        }
    }

    #[test]
    fn contravariance_exact() {
        for (m, n, k, l) in [(1, 1, 3, 1), (2, 0, 2, 1), (1, 1, 5, 2)] {
            let b = bundle(m, n, k, l);
            let r = verify_gram(&b, DEFAULT_TOLERANCE);
            assert!(r.all_passed(), "{:?}", r.failures().next());
        }
    }

    #[test]
    fn positivity_dichotomy() {
        // (m, n, k, l) and the first occupation with negative norm
        type Case = ((usize, usize, u32, u32), Option<&'static [u32]>);
        let cases: [Case; 4] = [
            ((1, 0, 5, 2), Some(&[3])),
            ((1, 0, 3, 2), Some(&[2])),
            ((2, 1, 3, 1), None),
            ((1, 1, 5, 1), None),
        ];
        for ((m, n, k, l), first) in cases {
            let b = bundle(m, n, k, l);
            let g = build_gram(b.field(), b.module());
            let p = positivity_analysis(b.field(), b.module(), &g).unwrap();
            assert_eq!(p.first_negative, first.map(occ));
            assert_eq!(p.positive_definite, first.is_none());
        }
    }

    #[test]
    fn route_agreement_two_bosons() {
        let b = bundle(2, 1, 4, 3);
        let g = build_gram(b.field(), b.module());
        assert!(route_consistency(&b, &g, DEFAULT_TOLERANCE).unwrap().all_passed());
        let single = bundle(1, 1, 3, 1);
        assert!(route_consistency(&single, &g, DEFAULT_TOLERANCE).is_err());
    }

    #[test]
    fn normalization_reproduces_orthonormal_basis() {
        for (m, n, k) in [(1, 1, 4), (2, 1, 3), (0, 2, 3)] {
            let raw = bundle(m, n, k, 1);
            let g = build_gram(raw.field(), raw.module());
            let d = normalization_diagonal(raw.field(), &g).unwrap();
            let ortho = CliffordBundle::orthonormal(raw.module().clone()).unwrap();
            let fl = raw.to_float();
            for i in 1..=raw.modes() {
                for lad in Ladder::BOTH {
                    let conj = to_orthonormal(fl.c(i, lad), &d);
                    assert!(max_difference(&conj, ortho.c(i, lad)) < 1e-10);
                }
            }
            let r = orthonormality_check(&ortho, 1e-10).unwrap();
            assert!(r.all_passed());
        }
        let l2 = bundle(1, 0, 5, 2);
        let g = build_gram(l2.field(), l2.module());
        assert!(normalization_diagonal(l2.field(), &g).is_err());
    }
}
