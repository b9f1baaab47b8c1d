//! Occupation-number bases of Fock modules.
//!
//! Basis vectors are ordered mixed-radix with the last mode varying fastest,
//! so `(0,…,0)` has rank 0 and the all-maximal vector has rank `dim - 1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cyclo::check_admissible;
use crate::error::{Error, Result};
use crate::qcore::GradingMap;

/// Human-readable description of the basis order, stored in report headers.
pub const BASIS_ORDER: &str = "mixed-radix, last mode fastest";

/// Occupation numbers (r_1, …, r_N) of a basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OccupationVector(pub Vec<u32>);

impl OccupationVector {
    pub fn new(r: Vec<u32>) -> Self {
        OccupationVector(r)
    }

    pub fn vacuum(modes: usize) -> Self {
        OccupationVector(vec![0; modes])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// r_i for 1-based mode i.
    pub fn get(&self, i: usize) -> u32 {
        self.0[i - 1]
    }

    /// r_1 + … + r_{i-1}.
    pub fn prefix(&self, i: usize) -> u32 {
        self.0[..i - 1].iter().sum()
    }

    /// Total occupation r_1 + … + r_N.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Copy with r_i shifted by `delta`; `None` when it would go negative.
    pub fn shifted(&self, i: usize, delta: i32) -> Option<Self> {
        let v = self.0[i - 1] as i64 + delta as i64;
        if v < 0 {
            return None;
        }
        let mut r = self.0.clone();
        r[i - 1] = v as u32;
        Some(OccupationVector(r))
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (j, r) in self.0.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("⟩")
    }
}

/// Total occupation of a basis vector.
pub fn grade(v: &OccupationVector) -> u32 {
    v.total()
}

/// Membership in the invariant subspace of the generic Fock space at q^{2k} = 1:
/// some bosonic occupation reaches k. Its complement is the quotient basis.
pub fn is_in_invariant_subspace(v: &OccupationVector, grading: GradingMap, k: u32) -> bool {
    v.0.iter().take(grading.m).any(|&r| r >= k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum ModuleKind {
    /// Root-of-unity quotient: bosonic occupations in 0..k.
    Quotient,
    /// Bounded slice of the generic module: bosonic occupations in 0..=cap.
    Truncated { cap: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockModule {
    grading: GradingMap,
    k: u32,
    l: u32,
    kind: ModuleKind,
    radices: Vec<u32>,
    basis: Vec<OccupationVector>,
}

impl FockModule {
    /// The quotient module with basis 0 <= r_i <= k-1 (bosonic), r_i ∈ {0,1} (fermionic).
    pub fn new(m: usize, n: usize, k: u32, l: u32) -> Result<Self> {
        Self::build(m, n, k, l, ModuleKind::Quotient)
    }

    /// Generic-module slice with bosonic occupations up to `cap`. Raising past
    /// `cap` is cut off, so identities only hold on occupations below it.
    pub fn truncated(m: usize, n: usize, k: u32, l: u32, cap: u32) -> Result<Self> {
        if cap == 0 {
            return Err(Error::Unsupported("truncation cap must be positive".into()));
        }
        Self::build(m, n, k, l, ModuleKind::Truncated { cap })
    }

    fn build(m: usize, n: usize, k: u32, l: u32, kind: ModuleKind) -> Result<Self> {
        check_admissible(k, l)?;
        if m + n == 0 {
            return Err(Error::EmptyModule { m, n });
        }
        let bos = match kind {
            ModuleKind::Quotient => k,
            ModuleKind::Truncated { cap } => cap + 1,
        };
        let radices: Vec<u32> = (0..m).map(|_| bos).chain((0..n).map(|_| 2)).collect();
        let dim: usize = radices.iter().map(|&r| r as usize).product();
        let mut module = FockModule {
            grading: GradingMap::new(m, n),
            k,
            l,
            kind,
            radices,
            basis: Vec::with_capacity(dim),
        };
        module.basis = (0..dim).map(|j| module.unrank_unchecked(j)).collect();
        Ok(module)
    }

    pub fn grading(&self) -> GradingMap {
        self.grading
    }

    pub fn m(&self) -> usize {
        self.grading.m
    }

    pub fn n(&self) -> usize {
        self.grading.n
    }

    pub fn modes(&self) -> usize {
        self.grading.modes()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn kind(&self) -> ModuleKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[OccupationVector] {
        &self.basis
    }

    pub fn vector(&self, index: usize) -> &OccupationVector {
        &self.basis[index]
    }

    /// Largest allowed occupation of mode i (1-based).
    pub fn max_occupation(&self, i: usize) -> u32 {
        self.radices[i - 1] - 1
    }

    pub fn contains(&self, v: &OccupationVector) -> bool {
        v.len() == self.modes() && v.0.iter().zip(&self.radices).all(|(r, b)| r < b)
    }

    pub fn rank(&self, v: &OccupationVector) -> Result<usize> {
        if !self.contains(v) {
            return Err(Error::OutOfBounds {
                occupation: v.0.clone(),
            });
        }
        Ok(v.0
            .iter()
            .zip(&self.radices)
            .fold(0usize, |acc, (r, b)| acc * *b as usize + *r as usize))
    }

    pub fn unrank(&self, index: usize) -> Result<OccupationVector> {
        if index >= self.dim() {
            return Err(Error::OutOfBounds {
                occupation: vec![index as u32],
            });
        }
        Ok(self.basis[index].clone())
    }

    fn unrank_unchecked(&self, mut index: usize) -> OccupationVector {
        let mut r = vec![0u32; self.radices.len()];
        for (slot, b) in r.iter_mut().zip(&self.radices).rev() {
            *slot = (index % *b as usize) as u32;
            index /= *b as usize;
        }
        OccupationVector(r)
    }

    /// Largest total occupation in the module.
    pub fn max_grade(&self) -> u32 {
        self.radices.iter().map(|b| b - 1).sum()
    }

    /// Indices of basis vectors with total occupation r; empty when r is out of range.
    pub fn grade_subspace(&self, r: u32) -> Vec<usize> {
        (0..self.dim()).filter(|&j| self.basis[j].total() == r).collect()
    }

    /// Dimension of each grade subspace, indexed by grade 0..=max_grade.
    pub fn grade_dims(&self) -> Vec<usize> {
        let mut dims = vec![0usize; self.max_grade() as usize + 1];
        for v in &self.basis {
            dims[v.total() as usize] += 1;
        }
        dims
    }

    pub fn basis_order(&self) -> &'static str {
        BASIS_ORDER
    }
}
