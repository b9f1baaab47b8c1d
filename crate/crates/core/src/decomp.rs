//! Irreducibility and the grade decomposition.
//!
//! The total occupation r_1 + … + r_N is preserved by every sl root vector, so
//! each grade subspace F_r is an sl submodule. Irreducibility is decided by
//! orbit spans: the smallest generator-stable subspace containing a seed.

use serde::{Deserialize, Serialize};

use crate::clifford::{BasisKind, CliffordBundle, Ladder};
use crate::cyclo::{Backend, ScalarField};
use crate::error::{Error, Result};
use crate::fock::FockModule;
use crate::matrix::{OperatorMatrix, SparseVec};
use crate::report::{IndexTuple, ReportEntry, VerificationReport};
use crate::slmn::CartanWeyl;

/// Float pivots above this magnitude are accepted as nonzero.
pub const PIVOT_THRESHOLD: f64 = 1e-10;

/// Pivots at or below this are zero; pivots in (PIVOT_NOISE_FLOOR, PIVOT_THRESHOLD]
/// abort with a precision warning.
pub const PIVOT_NOISE_FLOOR: f64 = 1e-12;

/// Incremental row echelon form over dense local coordinates.
struct Echelon<'a, F: ScalarField> {
    field: &'a F,
    rows: Vec<(usize, Vec<F::El>)>,
}

impl<'a, F: ScalarField> Echelon<'a, F> {
    fn new(field: &'a F) -> Self {
        Echelon { field, rows: Vec::new() }
    }

    /// Reduces `v` and inserts it if independent. Returns whether it was new.
    fn insert(&mut self, mut v: Vec<F::El>) -> Result<bool> {
        let f = self.field;
        if !f.is_exact() {
            // divide by the largest entry so the candidate has max-abs 1
            let (big, mag) = v
                .iter()
                .enumerate()
                .map(|(j, x)| (j, f.magnitude(x)))
                .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if mag == 0.0 {
                return Ok(false);
            }
            let s = f.inv(&v[big])?;
            v.iter_mut().for_each(|x| *x = f.mul(x, &s));
        }
        for (p, row) in &self.rows {
            if f.is_zero(&v[*p]) {
                continue;
            }
            let c = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                *x = f.sub(x, &f.mul(&c, r));
            }
        }
        let pivot = if f.is_exact() {
            v.iter().position(|x| !f.is_zero(x))
        } else {
            let (idx, mag) = v
                .iter()
                .enumerate()
                .map(|(j, x)| (j, f.magnitude(x)))
                .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if mag > PIVOT_THRESHOLD {
                Some(idx)
            } else if mag > PIVOT_NOISE_FLOOR {
                return Err(Error::PrecisionWarning { pivot: mag });
            } else {
                None
            }
        };
        let Some(p) = pivot else {
            return Ok(false);
        };
        let inv = f.inv(&v[p])?;
        v.iter_mut().for_each(|x| *x = f.mul(x, &inv));
        // keep earlier rows free of the new pivot so the reduction order stays valid
        for (_, row) in self.rows.iter_mut() {
            if f.is_zero(&row[p]) {
                continue;
            }
            let c = row[p].clone();
            for (x, r) in row.iter_mut().zip(&v) {
                *x = f.sub(x, &f.mul(&c, r));
            }
        }
        self.rows.push((p, v));
        Ok(true)
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Dimension of the smallest subspace containing `seed` and stable under
/// `generators`. `subspace` restricts the ambient space to the given basis
/// indices; every generator is first checked to map it into itself.
pub fn orbit_span<F: ScalarField>(
    field: &F,
    generators: &[&OperatorMatrix<F::El>],
    seed: &SparseVec<F::El>,
    subspace: Option<&[usize]>,
) -> Result<usize> {
    let dim = generators.first().map_or(0, |g| g.dim());
    let ambient: Vec<usize> = match subspace {
        Some(s) => s.to_vec(),
        None => (0..dim).collect(),
    };
    let mut local = vec![usize::MAX; dim];
    for (j, &g) in ambient.iter().enumerate() {
        local[g] = j;
    }
    if subspace.is_some() {
        let cols_by_gen: Vec<Vec<SparseVec<F::El>>> = generators.iter().map(|g| g.columns()).collect();
        for (gi, cols) in cols_by_gen.iter().enumerate() {
            for &c in &ambient {
                if cols[c].iter().any(|(r, _)| local[*r] == usize::MAX) {
                    return Err(Error::SubspaceLeak { generator: gi, column: c });
                }
            }
        }
    }
    if let Some((r, _)) = seed.iter().find(|(r, _)| local[*r] == usize::MAX) {
        return Err(Error::SubspaceLeak {
            generator: usize::MAX,
            column: *r,
        });
    }
    let to_dense = |v: &SparseVec<F::El>| {
        let mut d = vec![field.zero(); ambient.len()];
        for (r, x) in v {
            d[local[*r]] = x.clone();
        }
        d
    };
    let to_sparse = |d: &[F::El]| -> SparseVec<F::El> {
        d.iter()
            .enumerate()
            .filter(|(_, x)| !field.is_zero(x))
            .map(|(j, x)| (ambient[j], x.clone()))
            .collect()
    };
    let mut ech = Echelon::new(field);
    let mut queue = vec![seed.clone()];
    while let Some(v) = queue.pop() {
        if ech.rank() == ambient.len() {
            break;
        }
        if ech.insert(to_dense(&v))? {
            let (_, stored) = ech.rows.last().expect("just inserted");
            let w = to_sparse(stored);
            for g in generators {
                queue.push(g.apply(field, &w));
            }
        }
    }
    Ok(ech.rank())
}

fn basis_vector<F: ScalarField>(field: &F, j: usize) -> SparseVec<F::El> {
    vec![(j, field.one())]
}

/// Checks the sufficiency argument for irreducibility on a raw bundle: every
/// one-step lowering coefficient with r_i > 0 and every raising coefficient
/// below the top occupation is nonzero.
pub fn structural_irreducibility<F: ScalarField>(bundle: &CliffordBundle<F>) -> Result<VerificationReport> {
    if bundle.basis() != BasisKind::Raw {
        return Err(Error::Unsupported("structural irreducibility reads raw-basis coefficients".into()));
    }
    let f = bundle.field();
    let module = bundle.module();
    let mut report = VerificationReport::new();
    for i in 1..=module.modes() {
        let (mut lower_ok, mut raise_ok) = (true, true);
        for (col, v) in module.basis().iter().enumerate() {
            let coeff = |lad: Ladder, delta: i32| -> Result<bool> {
                let t = module.rank(&v.shifted(i, delta).expect("shift stays nonnegative"))?;
                Ok(bundle.c(i, lad).get(t, col).is_some_and(|x| !f.is_zero(x)))
            };
            if v.get(i) > 0 {
                lower_ok &= coeff(Ladder::Lower, -1)?;
            }
            if v.get(i) < module.max_occupation(i) {
                raise_ok &= coeff(Ladder::Raise, 1)?;
            }
        }
        let idx = || IndexTuple::new().at("i", i as i64);
        report.push(ReportEntry::predicate("decomp", "decomp.structural.lower", idx(), f.backend(), lower_ok));
        report.push(ReportEntry::predicate("decomp", "decomp.structural.raise", idx(), f.backend(), raise_ok));
    }
    report.sort();
    Ok(report)
}

/// Irreducibility of the whole module under the ladder generators: the orbit
/// of every basis vector is the whole module.
pub fn module_irreducibility<F: ScalarField>(bundle: &CliffordBundle<F>) -> Result<VerificationReport> {
    let f = bundle.field();
    let gens = bundle.ladder_generators();
    let refs: Vec<&OperatorMatrix<F::El>> = gens.iter().collect();
    let mut report = VerificationReport::new();
    for j in 0..bundle.dim() {
        let span = orbit_span(f, &refs, &basis_vector(f, j), None)?;
        report.push(ReportEntry::predicate(
            "decomp",
            "decomp.module_irreducible",
            IndexTuple::new().at("seed", j as i64),
            f.backend(),
            span == bundle.dim(),
        ));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeRecord {
    pub r: u32,
    pub dim: usize,
    pub irreducible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionRecord {
    pub m: usize,
    pub n: usize,
    pub k: u32,
    pub l: u32,
    pub grades: Vec<GradeRecord>,
    pub count: usize,
    pub total: usize,
}

impl DecompositionRecord {
    pub fn grade_dims(&self) -> Vec<usize> {
        self.grades.iter().map(|g| g.dim).collect()
    }
}

/// Number of grades, m(k-1) + n + 1.
pub fn expected_grade_count(m: usize, n: usize, k: u32) -> usize {
    m * (k as usize - 1) + n + 1
}

/// Splits the module into grade subspaces and decides sl-irreducibility of
/// each from every seed. Fails with `SubspaceLeak` if a root vector or Cartan
/// element does not preserve a grade.
pub fn decompose_sl<F: ScalarField>(cw: &CartanWeyl<F>, module: &FockModule) -> Result<DecompositionRecord> {
    let f = cw.field();
    let cartan: Vec<OperatorMatrix<F::El>> = (0..module.modes()).map(|i| cw.htilde(i)).collect();
    let mut gens: Vec<&OperatorMatrix<F::El>> = cw.root_vectors().into_iter().map(|(_, e)| e).collect();
    gens.extend(cartan.iter());
    let mut grades = Vec::new();
    for r in 0..=module.max_grade() {
        let sub = module.grade_subspace(r);
        if sub.is_empty() {
            continue;
        }
        let mut irreducible = true;
        for &j in &sub {
            let span = orbit_span(f, &gens, &basis_vector(f, j), Some(&sub))?;
            irreducible &= span == sub.len();
        }
        grades.push(GradeRecord {
            r,
            dim: sub.len(),
            irreducible,
        });
    }
    Ok(DecompositionRecord {
        m: module.m(),
        n: module.n(),
        k: module.k(),
        l: module.l(),
        count: grades.len(),
        total: grades.iter().map(|g| g.dim).sum(),
        grades,
    })
}

/// Counting and irreducibility checks on a record. Per-grade irreducibility
/// is asserted only at l = 1; otherwise the record carries the verdict alone.
pub fn verify_decomposition(record: &DecompositionRecord) -> VerificationReport {
    let mut report = VerificationReport::new();
    let ex = Backend::Exact;
    let expected_total = (record.k as usize).pow(record.m as u32) << record.n;
    report.push(ReportEntry::predicate(
        "decomp",
        "decomp.grade_count",
        IndexTuple::new(),
        ex,
        record.count == expected_grade_count(record.m, record.n, record.k),
    ));
    report.push(ReportEntry::predicate("decomp", "decomp.total_dimension", IndexTuple::new(), ex, record.total == expected_total));
    if record.l == 1 {
        for g in &record.grades {
            report.push(ReportEntry::predicate(
                "decomp",
                "decomp.grade_irreducible",
                IndexTuple::new().at("r", g.r as i64),
                ex,
                g.irreducible,
            ));
        }
    }
    report
}

/// For each pair of records with equal (m, n) and different k, checks that
/// the grade-dimension lists differ. Needs at least two distinct k.
pub fn inequivalence_check(records: &[DecompositionRecord]) -> Result<VerificationReport> {
    let mut ks: Vec<u32> = records.iter().map(|r| r.k).collect();
    ks.sort_unstable();
    ks.dedup();
    if ks.len() < 2 {
        return Err(Error::Unsupported("inequivalence needs records for at least two values of k".into()));
    }
    let mut report = VerificationReport::new();
    for (a, ra) in records.iter().enumerate() {
        for rb in &records[a + 1..] {
            if (ra.m, ra.n) != (rb.m, rb.n) || ra.k == rb.k {
                continue;
            }
            let (lo, hi) = if ra.k < rb.k { (ra, rb) } else { (rb, ra) };
            report.push(ReportEntry::predicate(
                "decomp",
                "decomp.inequivalent",
                IndexTuple::new()
                    .at("m", lo.m as i64)
                    .at("n", lo.n as i64)
                    .at("k_low", lo.k)
                    .at("k_high", hi.k),
                Backend::Exact,
                lo.grade_dims() != hi.grade_dims(),
            ));
        }
    }
    report.sort();
    Ok(report)
}
