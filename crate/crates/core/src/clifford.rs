//! Generator matrices c_i^±, N_i of the deformed Clifford superalgebra on a Fock module.
//!
//! Raw basis (|r⟩ = (c_1^+)^{r_1}…(c_N^+)^{r_N}|0⟩), with S = r_1 + … + r_{i-1}:
//!
//! ```text
//! N_i   |r⟩ = r_i |r⟩
//! c_i^+ |r⟩ = (-1)^{θ_i S} (1 - θ_i r_i) q̄^S      |r + e_i⟩
//! c_i^- |r⟩ = (-1)^{θ_i S} [r_i] c_q q^S          |r - e_i⟩
//! ```
//!
//! where θ_i = 1 for fermionic modes. In the quotient module c_i^+ kills
//! bosonic occupation k - 1; this is the only place the quotient enters.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cyclo::{Backend, ComplexField, CyclotomicField, ScalarField};
use crate::error::{Error, Result};
use crate::fock::{FockModule, ModuleKind, OccupationVector};
use crate::matrix::OperatorMatrix;
use crate::qcore::{c_q, q_bracket, Parity};
use crate::report::{Checker, IndexTuple, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Raw,
    Orthonormal,
}

impl std::fmt::Display for BasisKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BasisKind::Raw => "raw",
            BasisKind::Orthonormal => "orthonormal",
        })
    }
}

/// Creation (`Raise`, c^+) or annihilation (`Lower`, c^-).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ladder {
    Raise,
    Lower,
}

impl Ladder {
    pub const BOTH: [Ladder; 2] = [Ladder::Raise, Ladder::Lower];

    pub fn sign(self) -> i64 {
        match self {
            Ladder::Raise => 1,
            Ladder::Lower => -1,
        }
    }

    pub fn opposite(self) -> Ladder {
        match self {
            Ladder::Raise => Ladder::Lower,
            Ladder::Lower => Ladder::Raise,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Ladder::Raise => '+',
            Ladder::Lower => '-',
        }
    }
}

/// The generators c_i^±, N_i on one module over one backend.
#[derive(Debug, Clone)]
pub struct CliffordBundle<F: ScalarField> {
    field: F,
    module: FockModule,
    basis: BasisKind,
    raise: Vec<OperatorMatrix<F::El>>,
    lower: Vec<OperatorMatrix<F::El>>,
    number: Vec<OperatorMatrix<F::El>>,
}

fn check_field_matches<F: ScalarField>(field: &F, module: &FockModule) -> Result<()> {
    if field.k() != module.k() || field.l() != module.l() {
        return Err(Error::Unsupported(format!(
            "field (k={}, l={}) does not match module (k={}, l={})",
            field.k(),
            field.l(),
            module.k(),
            module.l()
        )));
    }
    Ok(())
}

fn number_matrices<F: ScalarField>(field: &F, module: &FockModule) -> Vec<OperatorMatrix<F::El>> {
    (1..=module.modes())
        .map(|i| OperatorMatrix::diagonal(field, module.basis().iter().map(|v| field.from_i64(v.get(i) as i64)).collect()))
        .collect()
}

impl<F: ScalarField> CliffordBundle<F> {
    /// Raw-basis generators over any backend.
    pub fn raw(field: F, module: FockModule) -> Result<Self> {
        check_field_matches(&field, &module)?;
        let g = module.grading();
        let cq = c_q(&field);
        let top = (1..=module.modes()).map(|i| module.max_occupation(i)).max().unwrap_or(0);
        let brackets: Vec<F::El> = (0..=top as i64).map(|x| q_bracket(&field, x)).collect();
        let mut raise = Vec::with_capacity(module.modes());
        let mut lower = Vec::with_capacity(module.modes());
        for i in 1..=module.modes() {
            let theta = 1 - g.parity(i).bit();
            let mut up = Vec::new();
            let mut down = Vec::new();
            for (col, v) in module.basis().iter().enumerate() {
                let s = v.prefix(i) as i64;
                let r = v.get(i);
                let sign = if theta * s % 2 == 1 { -1 } else { 1 };
                if r < module.max_occupation(i) {
                    let target = module.rank(&v.shifted(i, 1).expect("raising never underflows"))?;
                    let c = field.from_i64(sign * (1 - theta * r as i64));
                    up.push((target, col, field.mul(&c, &field.q_pow(-s))));
                }
                if r > 0 {
                    let target = module.rank(&v.shifted(i, -1).expect("r > 0"))?;
                    let c = field.mul(&field.from_i64(sign), &brackets[r as usize]);
                    down.push((target, col, field.mul(&field.mul(&c, &cq), &field.q_pow(s))));
                }
            }
            let p = Some(g.parity(i));
            raise.push(OperatorMatrix::from_triplets(&field, module.dim(), p, up));
            lower.push(OperatorMatrix::from_triplets(&field, module.dim(), p, down));
        }
        let number = number_matrices(&field, &module);
        Ok(CliffordBundle {
            field,
            module,
            basis: BasisKind::Raw,
            raise,
            lower,
            number,
        })
    }

    /// Assembles a bundle from prebuilt matrices, checking sizes and parities.
    pub fn from_parts(
        field: F,
        module: FockModule,
        basis: BasisKind,
        raise: Vec<OperatorMatrix<F::El>>,
        lower: Vec<OperatorMatrix<F::El>>,
        number: Vec<OperatorMatrix<F::El>>,
    ) -> Result<Self> {
        check_field_matches(&field, &module)?;
        let modes = module.modes();
        if raise.len() != modes || lower.len() != modes || number.len() != modes {
            return Err(Error::DimensionMismatch {
                left: modes,
                right: raise.len().min(lower.len()).min(number.len()),
            });
        }
        let g = module.grading();
        for (idx, mats) in [&raise, &lower, &number].into_iter().enumerate() {
            for (i, x) in mats.iter().enumerate() {
                if x.dim() != module.dim() {
                    return Err(Error::DimensionMismatch {
                        left: module.dim(),
                        right: x.dim(),
                    });
                }
                let want = if idx == 2 { Parity::Even } else { g.parity(i + 1) };
                if x.parity() != Some(want) {
                    return Err(Error::Schema(format!("generator parity mismatch at mode {}", i + 1)));
                }
            }
        }
        Ok(CliffordBundle {
            field,
            module,
            basis,
            raise,
            lower,
            number,
        })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn module(&self) -> &FockModule {
        &self.module
    }

    pub fn basis(&self) -> BasisKind {
        self.basis
    }

    pub fn backend(&self) -> Backend {
        self.field.backend()
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    pub fn modes(&self) -> usize {
        self.module.modes()
    }

    /// c_i^± for 1-based mode i.
    pub fn c(&self, i: usize, ladder: Ladder) -> &OperatorMatrix<F::El> {
        match ladder {
            Ladder::Raise => &self.raise[i - 1],
            Ladder::Lower => &self.lower[i - 1],
        }
    }

    pub fn number(&self, i: usize) -> &OperatorMatrix<F::El> {
        &self.number[i - 1]
    }

    /// Named generators in a fixed order: c1+, c1-, N1, c2+, …
    pub fn generators(&self) -> Vec<(String, &OperatorMatrix<F::El>)> {
        (1..=self.modes())
            .flat_map(|i| {
                [
                    (format!("c{i}+"), self.c(i, Ladder::Raise)),
                    (format!("c{i}-"), self.c(i, Ladder::Lower)),
                    (format!("N{i}"), self.number(i)),
                ]
            })
            .collect()
    }

    /// All ladder operators c_i^±.
    pub fn ladder_generators(&self) -> Vec<OperatorMatrix<F::El>> {
        (1..=self.modes())
            .flat_map(|i| [self.c(i, Ladder::Raise).clone(), self.c(i, Ladder::Lower).clone()])
            .collect()
    }

    /// Even diagonal matrix with entries q^{e(r)/2}.
    pub fn q_half_diag(&self, e: impl Fn(&OccupationVector) -> i64) -> OperatorMatrix<F::El> {
        let mut cache: HashMap<i64, F::El> = HashMap::new();
        let diag = self
            .module
            .basis()
            .iter()
            .map(|v| cache.entry(e(v)).or_insert_with_key(|x| self.field.q_half_pow(*x)).clone())
            .collect();
        OperatorMatrix::diagonal(&self.field, diag)
    }

    /// Even diagonal matrix with entries [x(r)].
    pub fn bracket_diag(&self, x: impl Fn(&OccupationVector) -> i64) -> OperatorMatrix<F::El> {
        let mut cache: HashMap<i64, F::El> = HashMap::new();
        let diag = self
            .module
            .basis()
            .iter()
            .map(|v| cache.entry(x(v)).or_insert_with_key(|x| q_bracket(&self.field, *x)).clone())
            .collect();
        OperatorMatrix::diagonal(&self.field, diag)
    }

    /// Even diagonal matrix with entries d(r)/den.
    pub fn rational_diag(&self, d: impl Fn(&OccupationVector) -> i64, den: i64) -> OperatorMatrix<F::El> {
        let diag = self
            .module
            .basis()
            .iter()
            .map(|v| self.field.from_ratio(d(v), den).expect("nonzero denominator"))
            .collect();
        OperatorMatrix::diagonal(&self.field, diag)
    }

    /// Column mask for truncated modules: keeps vectors whose bosonic occupations
    /// stay below the cap after `depth` raisings. `None` for quotient modules.
    pub fn interior_mask(&self, depth: u32) -> Option<Vec<bool>> {
        match self.module.kind() {
            ModuleKind::Quotient => None,
            ModuleKind::Truncated { cap } => Some(
                self.module
                    .basis()
                    .iter()
                    .map(|v| v.0.iter().take(self.module.m()).all(|&r| r + depth <= cap))
                    .collect(),
            ),
        }
    }

    /// Embeds every matrix into the complex numbers.
    pub fn to_float(&self) -> CliffordBundle<ComplexField> {
        let field = ComplexField::new(self.module.k(), self.module.l()).expect("module parameters are admissible");
        let emb = |xs: &Vec<OperatorMatrix<F::El>>| xs.iter().map(|x| x.to_complex(&self.field)).collect();
        CliffordBundle {
            field,
            module: self.module.clone(),
            basis: self.basis,
            raise: emb(&self.raise),
            lower: emb(&self.lower),
            number: emb(&self.number),
        }
    }
}

impl CliffordBundle<ComplexField> {
    /// Generators in the orthonormal basis |r) at the primitive root q = e^{iπ/k}:
    ///
    /// ```text
    /// bosonic   c^+ |r) = e^{-iπS/k} √(2 sin(π(r_j+1)/k) sin(π/2k) / sin²(π/k)) |r + e_j)
    ///           c^- |r) = e^{ iπS/k} √(2 sin(π r_j/k)    sin(π/2k) / sin²(π/k)) |r - e_j)
    /// fermionic c^+ |r) = (-1)^S (1 - r_j) e^{-iπS/k} √(1/cos(π/2k)) |r + e_j)
    ///           c^- |r) = (-1)^S r_j       e^{ iπS/k} √(1/cos(π/2k)) |r - e_j)
    /// ```
    pub fn orthonormal(module: FockModule) -> Result<Self> {
        if module.l() != 1 {
            return Err(Error::Unsupported(format!(
                "orthonormal basis needs a primitive root (l = 1), got l = {}",
                module.l()
            )));
        }
        if module.kind() != ModuleKind::Quotient {
            return Err(Error::Unsupported("orthonormal basis exists only on the quotient module".into()));
        }
        let field = ComplexField::new(module.k(), 1)?;
        let k = module.k() as f64;
        let g = module.grading();
        let bos_amp = |x: f64| (2.0 * (PI * x / k).sin() * (PI / (2.0 * k)).sin() / (PI / k).sin().powi(2)).sqrt();
        let fer_amp = (1.0 / (PI / (2.0 * k)).cos()).sqrt();
        let mut raise = Vec::new();
        let mut lower = Vec::new();
        for i in 1..=module.modes() {
            let mut up = Vec::new();
            let mut down = Vec::new();
            for (col, v) in module.basis().iter().enumerate() {
                let s = v.prefix(i) as i64;
                let r = v.get(i);
                let (up_amp, down_amp) = if g.is_bosonic(i) {
                    (bos_amp(r as f64 + 1.0), bos_amp(r as f64))
                } else {
                    let sign = if s % 2 == 1 { -1.0 } else { 1.0 };
                    (sign * (1.0 - r as f64) * fer_amp, sign * r as f64 * fer_amp)
                };
                if r < module.max_occupation(i) {
                    let target = module.rank(&v.shifted(i, 1).expect("raising"))?;
                    up.push((target, col, field.q_pow(-s) * up_amp));
                }
                if r > 0 {
                    let target = module.rank(&v.shifted(i, -1).expect("r > 0"))?;
                    down.push((target, col, field.q_pow(s) * down_amp));
                }
            }
            let p = Some(g.parity(i));
            raise.push(OperatorMatrix::from_triplets(&field, module.dim(), p, up));
            lower.push(OperatorMatrix::from_triplets(&field, module.dim(), p, down));
        }
        let number = number_matrices(&field, &module);
        Ok(CliffordBundle {
            field,
            module,
            basis: BasisKind::Orthonormal,
            raise,
            lower,
            number,
        })
    }
}

/// A bundle over either backend.
#[derive(Debug, Clone)]
pub enum Representation {
    Exact(CliffordBundle<CyclotomicField>),
    Float(CliffordBundle<ComplexField>),
}

impl Representation {
    pub fn module(&self) -> &FockModule {
        match self {
            Representation::Exact(b) => b.module(),
            Representation::Float(b) => b.module(),
        }
    }

    pub fn basis(&self) -> BasisKind {
        match self {
            Representation::Exact(b) => b.basis(),
            Representation::Float(b) => b.basis(),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            Representation::Exact(_) => Backend::Exact,
            Representation::Float(_) => Backend::Float,
        }
    }
}

/// Builds the generators for a backend/basis combination.
///
/// The orthonormal basis is float-only (its entries are square roots of sines)
/// and needs l = 1.
pub fn build_clifford(module: FockModule, backend: Backend, basis: BasisKind) -> Result<Representation> {
    match (backend, basis) {
        (Backend::Exact, BasisKind::Raw) => {
            let field = CyclotomicField::new(module.k(), module.l())?;
            Ok(Representation::Exact(CliffordBundle::raw(field, module)?))
        }
        (Backend::Float, BasisKind::Raw) => {
            let field = ComplexField::new(module.k(), module.l())?;
            Ok(Representation::Float(CliffordBundle::raw(field, module)?))
        }
        (Backend::Float, BasisKind::Orthonormal) => Ok(Representation::Float(CliffordBundle::orthonormal(module)?)),
        (Backend::Exact, BasisKind::Orthonormal) => Err(Error::Unsupported(
            "the orthonormal basis is not defined over the cyclotomic field".into(),
        )),
    }
}

fn restrict<E: Clone + PartialEq>(m: OperatorMatrix<E>, mask: &Option<Vec<bool>>) -> OperatorMatrix<E> {
    match mask {
        None => m,
        Some(keep) => m.retain_columns(keep),
    }
}

fn mul<F: ScalarField>(f: &F, a: &OperatorMatrix<F::El>, b: &OperatorMatrix<F::El>) -> OperatorMatrix<F::El> {
    a.mul(f, b).expect("bundle matrices share one dimension")
}

fn add<F: ScalarField>(f: &F, a: &OperatorMatrix<F::El>, b: &OperatorMatrix<F::El>) -> OperatorMatrix<F::El> {
    a.add(f, b).expect("bundle matrices share one dimension")
}

fn sub<F: ScalarField>(f: &F, a: &OperatorMatrix<F::El>, b: &OperatorMatrix<F::El>) -> OperatorMatrix<F::El> {
    a.sub(f, b).expect("bundle matrices share one dimension")
}

/// Checks the full presentation: number operators commute, shift the ladder
/// operators by ±1, the pair relations for both sign choices, the exchange
/// relations for all i < j and sign pairs, fermionic nilpotency, and the two
/// diagonal closed forms of c^+c^- and c^-c^+.
pub fn verify_clifford_relations<F: ScalarField>(bundle: &CliffordBundle<F>, tolerance: f64) -> VerificationReport {
    let f = bundle.field();
    let g = bundle.module().grading();
    let modes = bundle.modes();
    let mask = bundle.interior_mask(1);
    let mut ch = Checker::new(f, "clifford", tolerance);
    let cq = c_q(f);

    for i in 1..=modes {
        for j in 1..=modes {
            let r = sub(f, &mul(f, bundle.number(i), bundle.number(j)), &mul(f, bundle.number(j), bundle.number(i)));
            ch.zero("clifford.number_commute", IndexTuple::new().at("i", i as i64).at("j", j as i64), &r);
            for lad in Ladder::BOTH {
                let c = bundle.c(j, lad);
                let lhs = sub(f, &mul(f, bundle.number(i), c), &mul(f, c, bundle.number(i)));
                let rhs = if i == j { c.scale(f, &f.from_i64(lad.sign())) } else { OperatorMatrix::zeros(c.dim(), c.parity()) };
                let r = restrict(sub(f, &lhs, &rhs), &mask);
                ch.zero(
                    "clifford.number_shift",
                    IndexTuple::new().at("i", i as i64).at("j", j as i64).sign("sign", lad.sign()),
                    &r,
                );
            }
        }
    }

    for i in 1..=modes {
        let s = g.sign(i);
        let up = bundle.c(i, Ladder::Raise);
        let down = bundle.c(i, Ladder::Lower);
        let du = mul(f, down, up);
        let ud = mul(f, up, down);
        for pm in [1i64, -1] {
            let lhs = add(f, &du, &ud.scale(f, &f.mul(&f.from_i64(s), &f.q_pow(pm))));
            let rhs = bundle.q_half_diag(|v| 2 * pm * s * v.get(i) as i64).scale(f, &cq);
            let r = restrict(sub(f, &lhs, &rhs), &mask);
            ch.zero("clifford.pair", IndexTuple::new().at("i", i as i64).sign("sign", pm), &r);
        }
    }

    for i in 1..=modes {
        for j in (i + 1)..=modes {
            for xi in Ladder::BOTH {
                for eta in Ladder::BOTH {
                    let a = bundle.c(i, xi);
                    let b = bundle.c(j, eta);
                    let coeff = f.mul(&f.from_i64(g.sign(j)), &f.q_pow(xi.sign() * eta.sign()));
                    let r = add(f, &mul(f, a, b), &mul(f, b, a).scale(f, &coeff));
                    let r = restrict(r, &mask);
                    ch.zero(
                        "clifford.exchange",
                        IndexTuple::new()
                            .at("i", i as i64)
                            .at("j", j as i64)
                            .sign("xi", xi.sign())
                            .sign("eta", eta.sign()),
                        &r,
                    );
                }
            }
        }
    }

    for i in (g.m + 1)..=modes {
        for lad in Ladder::BOTH {
            let c = bundle.c(i, lad);
            ch.zero("clifford.nilpotent", IndexTuple::new().at("i", i as i64).sign("sign", lad.sign()), &mul(f, c, c));
        }
    }

    let mut report = ch.finish();
    report.merge(check_pair_diagonal_equivalence(bundle, tolerance));
    report.sort();
    report
}

/// Checks c_i^+c_i^- = c_q [N_i] and c_i^-c_i^+ = c_q [1 - (-1)^⟨i⟩ N_i] as
/// diagonal identities, and that these diagonals satisfy the pair relations
/// for both signs.
pub fn check_pair_diagonal_equivalence<F: ScalarField>(bundle: &CliffordBundle<F>, tolerance: f64) -> VerificationReport {
    let f = bundle.field();
    let g = bundle.module().grading();
    let mask = bundle.interior_mask(1);
    let cq = c_q(f);
    let mut ch = Checker::new(f, "clifford", tolerance);
    for i in 1..=bundle.modes() {
        let s = g.sign(i);
        let up = bundle.c(i, Ladder::Raise);
        let down = bundle.c(i, Ladder::Lower);
        let ud_diag = bundle.bracket_diag(|v| v.get(i) as i64).scale(f, &cq);
        let du_diag = bundle.bracket_diag(|v| 1 - s * v.get(i) as i64).scale(f, &cq);
        let idx = IndexTuple::new().at("i", i as i64);
        ch.zero("clifford.raise_lower_diagonal", idx.clone(), &restrict(sub(f, &mul(f, up, down), &ud_diag), &mask));
        ch.zero("clifford.lower_raise_diagonal", idx, &restrict(sub(f, &mul(f, down, up), &du_diag), &mask));
        for pm in [1i64, -1] {
            let lhs = add(f, &du_diag, &ud_diag.scale(f, &f.mul(&f.from_i64(s), &f.q_pow(pm))));
            let rhs = bundle.q_half_diag(|v| 2 * pm * s * v.get(i) as i64).scale(f, &cq);
            ch.zero(
                "clifford.pair_from_diagonals",
                IndexTuple::new().at("i", i as i64).sign("sign", pm),
                &sub(f, &lhs, &rhs),
            );
        }
    }
    ch.finish()
}

/// Checks c_i^-(c_i^+)^p = q̄^p (c_i^+)^p c_i^- + c_q [p] (c_i^+)^{p-1} q^{N_i}
/// for every bosonic mode i.
///
/// On the quotient module `p` must stay below k; on a truncated module only
/// columns with room for p raisings are compared.
pub fn verify_power_ladder<F: ScalarField>(bundle: &CliffordBundle<F>, p: u32, tolerance: f64) -> Result<VerificationReport> {
    if bundle.module().kind() == ModuleKind::Quotient && p >= bundle.module().k() {
        return Err(Error::Unsupported(format!("power {p} must be below k = {}", bundle.module().k())));
    }
    let f = bundle.field();
    let cq = c_q(f);
    let mask = bundle.interior_mask(p.max(1));
    let mut ch = Checker::new(f, "clifford", tolerance);
    for i in 1..=bundle.module().m() {
        let up = bundle.c(i, Ladder::Raise);
        let down = bundle.c(i, Ladder::Lower);
        let up_p = up.pow(f, p).expect("square matrix");
        let lhs = mul(f, down, &up_p);
        let mut rhs = mul(f, &up_p, down).scale(f, &f.q_pow(-(p as i64)));
        if p > 0 {
            let up_pm1 = up.pow(f, p - 1).expect("square matrix");
            let qn = bundle.q_half_diag(|v| 2 * v.get(i) as i64);
            let coeff = f.mul(&cq, &q_bracket(f, p as i64));
            rhs = add(f, &rhs, &mul(f, &up_pm1, &qn).scale(f, &coeff));
        }
        let r = restrict(sub(f, &lhs, &rhs), &mask);
        ch.zero("clifford.power_ladder", IndexTuple::new().at("i", i as i64).at("p", p as i64), &r);
    }
    Ok(ch.finish())
}

/// Convenience: complex matrix entry lookup used by tests and cross-checks.
pub fn entry(m: &OperatorMatrix<Complex64>, row: usize, col: usize) -> Complex64 {
    m.get(row, col).copied().unwrap_or_default()
}
