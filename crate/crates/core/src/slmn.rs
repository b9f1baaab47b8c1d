//! The sl(m|n) layer: Chevalley generators restricted from osp, the
//! Cartan–Weyl root vectors e_ij with Cartan elements H̃_i, and three
//! independent realizations of the root vectors.
//!
//! Root vectors in the operator realization, with s_i = (-1)^⟨i⟩:
//!
//! ```text
//! e_ij = ½ s_i q̄^{s_j N_j - 1/2} [[c_i^-, c_j^+]]       (i < j)
//! e_ij = ½ s_i [[c_i^-, c_j^+]] q^{s_i N_i - 1/2}       (i > j)
//! H̃_i  = -N_1 - s_{i+1} N_{i+1}                        (0 ≤ i < N)
//! ```
//!
//! H̃_0 extends the family so that L̃_{i-1} is defined for i = 1; it vanishes
//! whenever mode 1 is bosonic.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{BasisKind, CliffordBundle, Ladder};
use crate::cyclo::{ComplexField, CyclotomicField, ScalarField};
use crate::error::{Error, Result};
use crate::fock::{FockModule, ModuleKind};
use crate::gram::{build_gram, normalization_diagonal, to_orthonormal};
use crate::matrix::OperatorMatrix;
use crate::osp::OspBundle;
use crate::qcore::{build_cartan_sl, commutator, gbracket, gbracket_x, twisted, CartanMatrix, GradingMap, Parity};
use crate::report::{Checker, IndexTuple, VerificationReport};

type Mat<F> = OperatorMatrix<<F as ScalarField>::El>;

/// Agreement required between the three root-vector realizations.
pub const CROSSCHECK_TOLERANCE: f64 = 1e-10;

fn same_dim<T>(r: Result<T>) -> T {
    r.expect("generators share one dimension")
}

/// Chevalley generators ê_i, f̂_i, ĥ_i (i = 1..N-1).
///
/// ê_i = e_i, ĥ_i = h_i for i ≤ m; ê_i = -e_i, ĥ_i = -h_i for i > m; f̂_i = f_i.
#[derive(Debug, Clone)]
pub struct SlChevalley<F: ScalarField> {
    field: F,
    grading: GradingMap,
    cartan: CartanMatrix,
    e: Vec<Mat<F>>,
    f: Vec<Mat<F>>,
    h: Vec<Mat<F>>,
    h2: Vec<Vec<i64>>,
}

impl<F: ScalarField> SlChevalley<F> {
    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn grading(&self) -> GradingMap {
        self.grading
    }

    /// Number of simple roots, N - 1.
    pub fn rank(&self) -> usize {
        self.e.len()
    }

    pub fn cartan(&self) -> &CartanMatrix {
        &self.cartan
    }

    pub fn e(&self, i: usize) -> &Mat<F> {
        &self.e[i - 1]
    }

    pub fn f(&self, i: usize) -> &Mat<F> {
        &self.f[i - 1]
    }

    pub fn h(&self, i: usize) -> &Mat<F> {
        &self.h[i - 1]
    }

    /// q^{p ĥ_i}.
    pub fn k_pow(&self, i: usize, p: i64) -> Mat<F> {
        let fl = &self.field;
        OperatorMatrix::diagonal(fl, self.h2[i - 1].iter().map(|d| fl.q_half_pow(p * d)).collect())
    }
}

/// Restricts osp Chevalley generators to sl(m|n). Needs N ≥ 2.
pub fn build_sl_chevalley<F: ScalarField>(osp: &OspBundle<F>) -> Result<SlChevalley<F>> {
    let fl = osp.field();
    let g = osp.clifford().module().grading();
    let cartan = build_cartan_sl(g)?;
    let rank = osp.modes() - 1;
    let minus = fl.from_i64(-1);
    let sign = |i: usize, x: &Mat<F>| if i <= g.m { x.clone() } else { x.scale(fl, &minus) };
    Ok(SlChevalley {
        field: fl.clone(),
        grading: g,
        cartan,
        e: (1..=rank).map(|i| sign(i, osp.e(i))).collect(),
        f: (1..=rank).map(|i| osp.f(i).clone()).collect(),
        h: (1..=rank).map(|i| sign(i, osp.h(i))).collect(),
        h2: (1..=rank)
            .map(|i| {
                let s = if i <= g.m { 1 } else { -1 };
                osp.h_doubled(i).iter().map(|d| s * d).collect()
            })
            .collect(),
    })
}

/// Cartan–Kac relations and the ê and f̂ Serre relations.
pub fn verify_sl_chevalley_relations<F: ScalarField>(sl: &SlChevalley<F>, tolerance: f64) -> VerificationReport {
    let fl = sl.field();
    let g = sl.grading();
    let rank = sl.rank();
    let a = sl.cartan();
    let inv = fl.inv_q_diff();
    let mut ch = Checker::new(fl, "sl", tolerance);
    for i in 1..=rank {
        let want = g.theta_pair(i, i + 1);
        ch.holds(
            "sl.chevalley.parity",
            IndexTuple::new().at("i", i as i64),
            sl.e(i).parity() == Some(want) && sl.f(i).parity() == Some(want),
        );
        for j in 1..=rank {
            let idx = IndexTuple::new().at("i", i as i64).at("j", j as i64);
            ch.zero("sl.chevalley.cartan_commute", idx.clone(), &same_dim(commutator(fl, sl.h(i), sl.h(j))));
            let aij = fl.from_i64(a.get(i, j));
            let lhs = same_dim(commutator(fl, sl.h(i), sl.e(j)));
            ch.equal("sl.chevalley.weight_e", idx.clone(), &lhs, &sl.e(j).scale(fl, &aij));
            let lhs = same_dim(commutator(fl, sl.h(i), sl.f(j)));
            ch.equal("sl.chevalley.weight_f", idx.clone(), &lhs, &sl.f(j).scale(fl, &fl.neg(&aij)));
            let lhs = same_dim(gbracket(fl, sl.e(i), sl.f(j)));
            let rhs = if i == j {
                same_dim(sl.k_pow(i, 1).sub(fl, &sl.k_pow(i, -1))).scale(fl, &inv)
            } else {
                OperatorMatrix::zeros(lhs.dim(), lhs.parity())
            };
            ch.equal("sl.chevalley.ef", idx, &lhs, &rhs);
        }
    }
    for (tag, xs) in [("e", &sl.e), ("f", &sl.f)] {
        serre_sl(&mut ch, fl, g.m, rank, xs, tag);
    }
    ch.finish()
}

fn serre_sl<F: ScalarField>(ch: &mut Checker<'_, F>, fl: &F, m: usize, rank: usize, xs: &[Mat<F>], tag: &str) {
    let x = |i: usize| &xs[i - 1];
    let rel = |name: &str| format!("sl.serre.{tag}.{name}");
    let q = fl.q_pow(1);
    let qb = fl.q_pow(-1);
    for i in 1..=rank {
        for j in 1..=rank {
            if i != j && i.abs_diff(j) != 1 {
                let r = same_dim(commutator(fl, x(i), x(j)));
                ch.zero(&rel("commute"), IndexTuple::new().at("i", i as i64).at("j", j as i64), &r);
            }
        }
        if i == m {
            continue;
        }
        for d in [1i64, -1] {
            let nb = i as i64 + d;
            if nb < 1 || nb > rank as i64 {
                continue;
            }
            for (order, t_in, t_out) in [(-1i64, &qb, &q), (1, &q, &qb)] {
                let inner = same_dim(twisted(fl, x(i), x(nb as usize), t_in));
                let r = same_dim(twisted(fl, x(i), &inner, t_out));
                ch.zero(&rel("cubic"), IndexTuple::new().at("i", i as i64).sign("d", d).sign("inner", order), &r);
            }
        }
    }
    if m >= 1 && m <= rank {
        ch.zero(&rel("square"), IndexTuple::new().at("i", m as i64), &same_dim(x(m).mul(fl, x(m))));
    }
    if m >= 2 && m < rank {
        for (order, t1, t2) in [(1i64, &q, &qb), (-1, &qb, &q)] {
            let inner = same_dim(twisted(fl, &same_dim(twisted(fl, x(m - 1), x(m), t1)), x(m + 1), t2));
            let r = same_dim(x(m).mul(fl, &inner).and_then(|a| a.add(fl, &same_dim(inner.mul(fl, x(m))))));
            ch.zero(&rel("odd_node"), IndexTuple::new().sign("inner", order), &r);
        }
    }
}

/// How the root vectors were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Realization {
    /// Products of Clifford generators; any backend and basis.
    Operator,
    /// Compositions of orthonormal-basis ladder matrices; float, l = 1.
    Composed,
    /// Matrix elements filled in from closed-form sines; float, l = 1.
    ClosedForm,
}

impl std::fmt::Display for Realization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Realization::Operator => "operator",
            Realization::Composed => "composed",
            Realization::ClosedForm => "closed_form",
        })
    }
}

/// Sort key for the normal order: positive root vectors before negative
/// ones before Cartan elements, each group lexicographic in its labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NormalOrderKey {
    Positive(usize, usize),
    Negative(usize, usize),
    Cartan(usize),
}

impl NormalOrderKey {
    /// Key of the root vector e_ij, i ≠ j.
    pub fn root(i: usize, j: usize) -> Self {
        debug_assert_ne!(i, j);
        if i < j {
            NormalOrderKey::Positive(i, j)
        } else {
            NormalOrderKey::Negative(i, j)
        }
    }
}

/// Root vectors e_ij (i ≠ j) and Cartan elements H̃_0..H̃_{N-1}.
#[derive(Debug, Clone)]
pub struct CartanWeyl<F: ScalarField> {
    field: F,
    grading: GradingMap,
    dim: usize,
    realization: Realization,
    roots: BTreeMap<(usize, usize), Mat<F>>,
    /// Integer eigenvalues of H̃_i per basis vector.
    htilde: Vec<Vec<i64>>,
    zero: Mat<F>,
}

impl<F: ScalarField> CartanWeyl<F> {
    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn grading(&self) -> GradingMap {
        self.grading
    }

    pub fn modes(&self) -> usize {
        self.grading.modes()
    }

    pub fn realization(&self) -> Realization {
        self.realization
    }

    /// e_ij; the zero matrix when i = j.
    pub fn e(&self, i: usize, j: usize) -> &Mat<F> {
        self.roots.get(&(i, j)).unwrap_or(&self.zero)
    }

    /// All root vectors in normal order.
    pub fn root_vectors(&self) -> Vec<((usize, usize), &Mat<F>)> {
        let mut v: Vec<_> = self.roots.iter().map(|(k, m)| (*k, m)).collect();
        v.sort_by_key(|((i, j), _)| NormalOrderKey::root(*i, *j));
        v
    }

    pub fn htilde_eigenvalues(&self, i: usize) -> &[i64] {
        &self.htilde[i]
    }

    pub fn htilde(&self, i: usize) -> Mat<F> {
        let fl = &self.field;
        OperatorMatrix::diagonal(fl, self.htilde[i].iter().map(|d| fl.from_i64(*d)).collect())
    }

    /// q^{Σ p_a H̃_{i_a}} for a list of (i, p) pairs.
    pub fn ltilde(&self, factors: &[(usize, i64)]) -> Mat<F> {
        let fl = &self.field;
        let diag = (0..self.dim)
            .map(|r| fl.q_pow(factors.iter().map(|(i, p)| p * self.htilde[*i][r]).sum()))
            .collect();
        OperatorMatrix::diagonal(fl, diag)
    }
}

fn htilde_table(module: &FockModule) -> Vec<Vec<i64>> {
    let g = module.grading();
    (0..module.modes())
        .map(|i| {
            module
                .basis()
                .iter()
                .map(|v| -(v.get(1) as i64) - g.sign(i + 1) * v.get(i + 1) as i64)
                .collect()
        })
        .collect()
}

fn assemble<F: ScalarField>(
    field: F,
    module: &FockModule,
    realization: Realization,
    roots: BTreeMap<(usize, usize), Mat<F>>,
) -> CartanWeyl<F> {
    CartanWeyl {
        field,
        grading: module.grading(),
        dim: module.dim(),
        realization,
        roots,
        htilde: htilde_table(module),
        zero: OperatorMatrix::zeros(module.dim(), Some(Parity::Even)),
    }
}

/// Operator realization from the Clifford generators of any bundle.
pub fn build_cartan_weyl<F: ScalarField>(bundle: &CliffordBundle<F>) -> CartanWeyl<F> {
    let fl = bundle.field();
    let module = bundle.module();
    let g = module.grading();
    let half = fl.from_ratio(1, 2).expect("2 is invertible");
    let mut roots = BTreeMap::new();
    for i in 1..=module.modes() {
        for j in 1..=module.modes() {
            if i == j {
                continue;
            }
            let b = same_dim(gbracket(fl, bundle.c(i, Ladder::Lower), bundle.c(j, Ladder::Raise)));
            let pref = fl.mul(&half, &fl.from_i64(g.sign(i)));
            let x = if i < j {
                let sj = g.sign(j);
                same_dim(bundle.q_half_diag(|v| 1 - 2 * sj * v.get(j) as i64).mul(fl, &b))
            } else {
                let si = g.sign(i);
                same_dim(b.mul(fl, &bundle.q_half_diag(|v| 2 * si * v.get(i) as i64 - 1)))
            };
            roots.insert((i, j), x.scale(fl, &pref));
        }
    }
    assemble(fl.clone(), module, Realization::Operator, roots)
}

/// Composed realization from orthonormal ladder matrices C^±, q = e^{iπ/k}:
///
/// ```text
/// e_ij = -s_i s_j cos(π/2k) q^{-s_j N_j} C_j^+ C_i^-      (i < j)
/// e_ij = -cos(π/2k) C_j^+ C_i^- q^{s_i N_i}               (i > j)
/// ```
pub fn build_composed(ortho: &CliffordBundle<ComplexField>) -> Result<CartanWeyl<ComplexField>> {
    if ortho.basis() != BasisKind::Orthonormal {
        return Err(Error::Unsupported("the composed realization needs the orthonormal basis".into()));
    }
    let fl = ortho.field();
    let module = ortho.module();
    let g = module.grading();
    let k = module.k() as f64;
    let cos = (PI / (2.0 * k)).cos();
    let mut roots = BTreeMap::new();
    for i in 1..=module.modes() {
        for j in 1..=module.modes() {
            if i == j {
                continue;
            }
            let prod = same_dim(ortho.c(j, Ladder::Raise).mul(fl, ortho.c(i, Ladder::Lower)));
            let x = if i < j {
                let sj = g.sign(j);
                let d = ortho.q_half_diag(|v| -2 * sj * v.get(j) as i64);
                same_dim(d.mul(fl, &prod)).scale(fl, &Complex64::new(-((g.sign(i) * sj) as f64) * cos, 0.0))
            } else {
                let si = g.sign(i);
                let d = ortho.q_half_diag(|v| 2 * si * v.get(i) as i64);
                same_dim(prod.mul(fl, &d)).scale(fl, &Complex64::new(-cos, 0.0))
            };
            roots.insert((i, j), x);
        }
    }
    Ok(assemble(fl.clone(), module, Realization::Composed, roots))
}

/// Closed-form matrix elements in the orthonormal basis. For e_ab acting on
/// |r) with target |r - e_a + e_b), writing ⟨x⟩ for the mode parity bit:
///
/// ```text
/// a < b: sign exponent (⟨a⟩-⟨b⟩)(r_1+…+r_a) + (1-⟨b⟩)(r_{a+1}+…+r_{b-1})
///        phase exp(-iπ(r_a+…+r_{b-1} + s_b r_b - 2⟨b⟩)/k)
/// a > b: sign exponent (⟨b⟩-⟨a⟩)(r_1+…+r_b) + (1-⟨a⟩)(r_{b+1}+…+r_{a-1})
///        phase exp(iπ(r_b+…+r_{a-1} + s_a r_a)/k)
/// entry = -(1 - (1-⟨b⟩) r_b) · sign · phase · √|sin(πr_a/k) sin(π(r_b+1)/k)| / sin(π/k)
/// ```
pub fn build_closed_form(module: &FockModule) -> Result<CartanWeyl<ComplexField>> {
    if module.l() != 1 || module.kind() != ModuleKind::Quotient {
        return Err(Error::Unsupported("closed-form matrix elements need l = 1 on the quotient module".into()));
    }
    let fl = ComplexField::new(module.k(), 1)?;
    let g = module.grading();
    let k = module.k() as f64;
    let od = |x: usize| g.parity(x).bit();
    let mut roots = BTreeMap::new();
    for a in 1..=module.modes() {
        for b in 1..=module.modes() {
            if a == b {
                continue;
            }
            let mut triplets = Vec::new();
            for (col, v) in module.basis().iter().enumerate() {
                let Some(t) = v.shifted(a, -1).and_then(|t| t.shifted(b, 1)) else {
                    continue;
                };
                if !module.contains(&t) {
                    continue;
                }
                let r = |x: usize| v.get(x) as i64;
                let span = |lo: usize, hi: usize| (lo..=hi).map(r).sum::<i64>();
                let (sign_exp, phase) = if a < b {
                    let e = (od(a) - od(b)) * span(1, a) + (1 - od(b)) * span(a + 1, b - 1);
                    (e, -(span(a, b - 1) + g.sign(b) * r(b) - 2 * od(b)) as f64)
                } else {
                    let e = (od(b) - od(a)) * span(1, b) + (1 - od(a)) * span(b + 1, a - 1);
                    (e, (span(b, a - 1) + g.sign(a) * r(a)) as f64)
                };
                let sign = if sign_exp.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
                let mag = ((PI * r(a) as f64 / k).sin() * (PI * (r(b) + 1) as f64 / k).sin()).abs().sqrt() / (PI / k).sin();
                let pref = -(1 - (1 - od(b)) * r(b)) as f64;
                let z = Complex64::from_polar(pref * sign * mag, PI * phase / k);
                triplets.push((module.rank(&t)?, col, z));
            }
            let parity = Some(g.theta_pair(a, b));
            roots.insert((a, b), OperatorMatrix::from_triplets(&fl, module.dim(), parity, triplets));
        }
    }
    Ok(assemble(fl, module, Realization::ClosedForm, roots))
}

fn step(xs: &[usize]) -> bool {
    xs.windows(2).all(|w| w[0] > w[1])
}

fn if_step(xs: &[usize]) -> i64 {
    step(xs) as i64
}

/// Sum of scaled matrices; an empty sum is the zero matrix.
fn combo<F: ScalarField>(fl: &F, dim: usize, terms: Vec<(F::El, Mat<F>)>) -> Mat<F> {
    terms.into_iter().fold(OperatorMatrix::zeros(dim, None), |acc, (c, m)| {
        if fl.is_zero(&c) {
            acc
        } else {
            same_dim(acc.add(fl, &m.scale(fl, &c)))
        }
    })
}

/// Full Cartan–Weyl relation set.
pub fn verify_cartan_weyl_relations<F: ScalarField>(cw: &CartanWeyl<F>, tolerance: f64) -> VerificationReport {
    let fl = cw.field();
    let g = cw.grading();
    let modes = cw.modes();
    let dim = cw.dim;
    let q = fl.q_pow(1);
    let qd = fl.sub(&q, &fl.q_pow(-1));
    let inv = fl.inv_q_diff();
    let ts = |i: usize| g.theta_sign(i);
    let d = |a: usize, b: usize| a == b;
    let mut ch = Checker::new(fl, "sl", tolerance);

    for i in 0..modes {
        for j in 0..modes {
            let r = same_dim(commutator(fl, &cw.htilde(i), &cw.htilde(j)));
            ch.zero("sl.cw.cartan_commute", IndexTuple::new().at("i", i as i64).at("j", j as i64), &r);
        }
    }

    for i in 0..modes {
        let h = cw.htilde(i);
        for ((j, k), e) in cw.root_vectors() {
            let c = d(j, 1) as i64 - d(k, 1) as i64 - g.theta_sign(i + 1) * (d(i + 1, j) as i64 - d(i + 1, k) as i64);
            let lhs = same_dim(commutator(fl, &h, e));
            ch.equal(
                "sl.cw.weight",
                IndexTuple::new().at("i", i as i64).at("j", j as i64).at("k", k as i64),
                &lhs,
                &e.scale(fl, &fl.from_i64(c)),
            );
        }
    }

    let pos: Vec<(usize, usize)> = cw.roots.keys().copied().filter(|(i, j)| i < j).collect();
    let neg: Vec<(usize, usize)> = cw.roots.keys().copied().filter(|(i, j)| i > j).collect();
    let prod = |a: &Mat<F>, b: &Mat<F>| same_dim(a.mul(fl, b));
    let int = |x: i64| fl.from_i64(x);

    for &(i, j) in &pos {
        for &(k, l) in &neg {
            let lhs = same_dim(gbracket(fl, cw.e(i, j), cw.e(k, l)));
            let t1 = combo(
                fl,
                dim,
                vec![
                    (fl.mul(&qd, &int(if_step(&[j, k, i, l]) * ts(k))), prod(cw.e(k, j), cw.e(i, l))),
                    (int(-(d(i, l) as i64) * if_step(&[j, k]) * ts(k) * ts(l)), cw.e(k, j).clone()),
                    (int(d(j, k) as i64 * if_step(&[i, l])), cw.e(i, l).clone()),
                ],
            );
            let t1 = prod(&t1, &cw.ltilde(&[(i - 1, 1), (k - 1, -1)]));
            let t2 = combo(
                fl,
                dim,
                vec![
                    (fl.mul(&qd, &int(-if_step(&[k, j, l, i]) * ts(j))), prod(cw.e(i, l), cw.e(k, j))),
                    (int(-(d(i, l) as i64) * if_step(&[k, j]) * ts(i) * ts(j)), cw.e(k, j).clone()),
                    (int(d(j, k) as i64 * if_step(&[l, i])), cw.e(i, l).clone()),
                ],
            );
            let t2 = prod(&cw.ltilde(&[(j - 1, 1), (l - 1, -1)]), &t2);
            let mut rhs = same_dim(t1.add(fl, &t2));
            if i == l && j == k {
                let s = ts(i);
                let diff = same_dim(cw.ltilde(&[(j - 1, s), (i - 1, -s)]).sub(fl, &cw.ltilde(&[(j - 1, -s), (i - 1, s)])));
                rhs = same_dim(rhs.add(fl, &diff.scale(fl, &inv)));
            }
            ch.equal(
                "sl.cw.mixed",
                IndexTuple::new().at("i", i as i64).at("j", j as i64).at("k", k as i64).at("l", l as i64),
                &lhs,
                &rhs,
            );
        }
    }

    let twist_exp = |i: usize, j: usize, k: usize, l: usize| {
        ts(j) * d(j, l) as i64 - ts(j) * d(j, k) as i64 + ts(i) * d(i, k) as i64
    };
    for &(i, j) in &pos {
        for &(k, l) in &pos {
            if NormalOrderKey::root(i, j) >= NormalOrderKey::root(k, l) {
                continue;
            }
            let lhs = same_dim(gbracket_x(fl, cw.e(i, j), cw.e(k, l), &fl.q_pow(twist_exp(i, j, k, l))));
            let rhs = combo(
                fl,
                dim,
                vec![
                    (int(d(j, k) as i64), cw.e(i, l).clone()),
                    (fl.mul(&qd, &int(ts(k) * if_step(&[l, j, k, i]))), prod(cw.e(k, j), cw.e(i, l))),
                ],
            );
            ch.equal(
                "sl.cw.positive",
                IndexTuple::new().at("i", i as i64).at("j", j as i64).at("k", k as i64).at("l", l as i64),
                &lhs,
                &rhs,
            );
        }
    }
    for &(i, j) in &neg {
        for &(k, l) in &neg {
            if NormalOrderKey::root(k, l) >= NormalOrderKey::root(i, j) {
                continue;
            }
            let lhs = same_dim(gbracket_x(fl, cw.e(i, j), cw.e(k, l), &fl.q_pow(-twist_exp(i, j, k, l))));
            let rhs = combo(
                fl,
                dim,
                vec![
                    (int(d(j, k) as i64), cw.e(i, l).clone()),
                    (fl.mul(&qd, &int(-ts(k) * if_step(&[i, k, j, l]))), prod(cw.e(k, j), cw.e(i, l))),
                ],
            );
            ch.equal(
                "sl.cw.negative",
                IndexTuple::new().at("i", i as i64).at("j", j as i64).at("k", k as i64).at("l", l as i64),
                &lhs,
                &rhs,
            );
        }
    }

    for ((i, j), e) in cw.root_vectors() {
        let idx = IndexTuple::new().at("i", i as i64).at("j", j as i64);
        ch.holds("sl.cw.parity", idx.clone(), e.parity() == Some(g.theta_pair(i, j)));
        if g.theta_pair(i, j) == Parity::Odd {
            ch.zero("sl.cw.odd_square", idx, &prod(e, e));
        }
    }
    ch.finish()
}

/// Ties the two generating sets together: ê_i = -e_{i,i+1}, f̂_i = -e_{i+1,i},
/// and, when m ≥ 1, H̃_i = Σ_{j≤i} (-1)^θ_j ĥ_j.
pub fn verify_links<F: ScalarField>(sl: &SlChevalley<F>, cw: &CartanWeyl<F>, tolerance: f64) -> VerificationReport {
    let fl = sl.field();
    let g = sl.grading();
    let mut ch = Checker::new(fl, "sl", tolerance);
    let mut acc: Mat<F> = OperatorMatrix::zeros(cw.dim, Some(Parity::Even));
    for i in 1..=sl.rank() {
        let idx = IndexTuple::new().at("i", i as i64);
        ch.zero("sl.link.e", idx.clone(), &same_dim(sl.e(i).add(fl, cw.e(i, i + 1))));
        ch.zero("sl.link.f", idx.clone(), &same_dim(sl.f(i).add(fl, cw.e(i + 1, i))));
        acc = same_dim(acc.add(fl, &sl.h(i).scale(fl, &fl.from_i64(g.theta_sign(i)))));
        if g.m >= 1 {
            ch.equal("sl.link.cartan", idx, &acc, &cw.htilde(i));
        }
    }
    ch.finish()
}

/// Compares the operator realization (conjugated into the orthonormal basis
/// by √G) with the composed and closed-form realizations. Needs l = 1.
pub fn crosscheck_realizations(exact: &CartanWeyl<CyclotomicField>, module: &FockModule) -> Result<VerificationReport> {
    if exact.realization() != Realization::Operator {
        return Err(Error::Unsupported("the reference side must be the operator realization".into()));
    }
    let gram = build_gram(exact.field(), module);
    let norm = normalization_diagonal(exact.field(), &gram)?;
    let composed = build_composed(&CliffordBundle::orthonormal(module.clone())?)?;
    let closed = build_closed_form(module)?;
    let fl = composed.field().clone();
    let mut ch = Checker::new(&fl, "sl", CROSSCHECK_TOLERANCE);
    for ((i, j), e) in exact.root_vectors() {
        let op = to_orthonormal(&e.to_complex(exact.field()), &norm);
        let idx = IndexTuple::new().at("i", i as i64).at("j", j as i64);
        ch.equal("sl.realization.operator_vs_composed", idx.clone(), &op, composed.e(i, j));
        ch.equal("sl.realization.operator_vs_closed_form", idx.clone(), &op, closed.e(i, j));
        ch.equal("sl.realization.composed_vs_closed_form", idx, composed.e(i, j), closed.e(i, j));
    }
    for i in 0..module.modes() {
        let same = exact.htilde_eigenvalues(i) == composed.htilde_eigenvalues(i)
            && exact.htilde_eigenvalues(i) == closed.htilde_eigenvalues(i);
        ch.holds("sl.realization.cartan", IndexTuple::new().at("i", i as i64), same);
    }
    Ok(ch.finish())
}

/// Both presentations of sl(m|n) plus the identities linking them.
/// With fewer than two modes there are no simple roots and the Chevalley
/// part is skipped.
pub fn verify_sl<F: ScalarField>(osp: &OspBundle<F>, tolerance: f64) -> VerificationReport {
    let cw = build_cartan_weyl(osp.clifford());
    let mut report = verify_cartan_weyl_relations(&cw, tolerance);
    if let Ok(sl) = build_sl_chevalley(osp) {
        report.merge(verify_sl_chevalley_relations(&sl, tolerance));
        report.merge(verify_links(&sl, &cw, tolerance));
    }
    report.sort();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::osp::build_osp;
    use crate::report::DEFAULT_TOLERANCE;

    fn raw(m: usize, n: usize, k: u32, l: u32) -> CliffordBundle<CyclotomicField> {
        CliffordBundle::raw(CyclotomicField::new(k, l).unwrap(), FockModule::new(m, n, k, l).unwrap()).unwrap()
    }

    #[test]
    fn normal_order_is_total_on_positive_labels() {
        let mut keys: Vec<_> = (1..=4).flat_map(|i| (i + 1..=4).map(move |j| NormalOrderKey::root(i, j))).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), 6);
        assert!(NormalOrderKey::root(3, 4) < NormalOrderKey::root(2, 1));
        assert!(NormalOrderKey::root(4, 3) < NormalOrderKey::Cartan(0));
        assert!(NormalOrderKey::root(1, 3) < NormalOrderKey::root(2, 3));
    }

    #[test]
    fn chevalley_signs_follow_the_grading() {
        let b = raw(1, 2, 2, 1);
        let osp = build_osp(&b).unwrap();
        let sl = build_sl_chevalley(&osp).unwrap();
        let fl = b.field();
        assert_eq!(sl.e(1), osp.e(1));
        assert_eq!(sl.e(2), &osp.e(2).neg(fl));
        assert_eq!(sl.h(2), &osp.h(2).neg(fl));
        assert_eq!(sl.f(2), osp.f(2));
        assert!(matches!(build_sl_chevalley(&build_osp(&raw(1, 0, 3, 1)).unwrap()), Err(Error::CartanSize { .. })));
    }

    #[test]
    fn htilde_eigenvalues() {
        let cw = build_cartan_weyl(&raw(1, 1, 3, 1));
        let m = FockModule::new(1, 1, 3, 1).unwrap();
        for (j, v) in m.basis().iter().enumerate() {
            // mode 2 is fermionic, so its sign is +1
            assert_eq!(cw.htilde_eigenvalues(1)[j], -(v.get(1) as i64) - v.get(2) as i64);
            assert_eq!(cw.htilde_eigenvalues(0)[j], 0);
        }
        let cw = build_cartan_weyl(&raw(0, 2, 2, 1));
        assert_eq!(cw.htilde_eigenvalues(0), &[0, 0, -2, -2]);
    }

    #[test]
    fn root_vectors_kill_vacuum() {
        // every e_ij contains a lowering factor c_i^-
        let cw = build_cartan_weyl(&raw(2, 1, 3, 1));
        for (_, e) in cw.root_vectors() {
            assert!(e.columns()[0].is_empty());
            assert!(!e.is_zero());
        }
    }

    #[test]
    fn closed_form_sample_entry() {
        // (1,1,3): e_12 |1,0) = e^{-iπ/3} |0,1): sign -1 from r_1, prefactor -1, unit magnitude
        let m = FockModule::new(1, 1, 3, 1).unwrap();
        let cw = build_closed_form(&m).unwrap();
        let src = m.rank(&crate::fock::OccupationVector(vec![1, 0])).unwrap();
        let dst = m.rank(&crate::fock::OccupationVector(vec![0, 1])).unwrap();
        let z = cw.e(1, 2).get(dst, src).copied().unwrap();
        let want = Complex64::from_polar(1.0, -PI / 3.0);
        assert!((z - want).norm() < 1e-12, "{z}");
    }

    #[test]
    fn exact_relations_hold_across_grid() {
        for (m, n, k, l) in [(1, 1, 2, 1), (2, 1, 3, 1), (1, 2, 3, 1), (2, 2, 2, 1), (1, 1, 5, 2), (1, 0, 4, 3), (0, 2, 2, 1), (2, 0, 3, 1), (0, 3, 2, 1)] {
            let osp = build_osp(&raw(m, n, k, l)).unwrap();
            let r = verify_sl(&osp, DEFAULT_TOLERANCE);
            assert!(r.all_passed(), "({m},{n},{k},{l}) {}", r.failures().next().unwrap().id());
        }
    }

    #[test]
    fn serre_coverage() {
        let osp = build_osp(&raw(2, 2, 2, 1)).unwrap();
        let r = verify_sl(&osp, DEFAULT_TOLERANCE);
        for fam in ["e", "f"] {
            assert_eq!(r.matching(&format!("sl.serre.{fam}.odd_node")).count(), 2);
            assert_eq!(r.matching(&format!("sl.serre.{fam}.square")).count(), 1);
        }
        let osp = build_osp(&raw(2, 1, 3, 1)).unwrap();
        assert_eq!(verify_sl(&osp, DEFAULT_TOLERANCE).matching("sl.serre.e.odd_node").count(), 0);
    }

    #[test]
    fn realizations_agree() {
        for (m, n, k) in [(1, 1, 2), (2, 1, 3), (1, 2, 4)] {
            let module = FockModule::new(m, n, k, 1).unwrap();
            let cw = build_cartan_weyl(&raw(m, n, k, 1));
            let r = crosscheck_realizations(&cw, &module).unwrap();
            assert!(r.all_passed(), "({m},{n},{k}) {}", r.failures().next().unwrap().id());
        }
    }

    #[test]
    fn float_realizations_satisfy_relations() {
        let module = FockModule::new(2, 1, 3, 1).unwrap();
        let closed = build_closed_form(&module).unwrap();
        assert!(verify_cartan_weyl_relations(&closed, 1e-10).all_passed());
        assert!(build_closed_form(&FockModule::new(1, 1, 5, 2).unwrap()).is_err());
    }
}
