//! Sparse Z2-graded operator matrices over a [`ScalarField`].

use num_complex::Complex64;

use crate::cyclo::ScalarField;
use crate::error::{Error, Result};
use crate::qcore::Parity;

/// Sparse vector as sorted `(index, value)` pairs with no stored zeros.
pub type SparseVec<E> = Vec<(usize, E)>;

/// Square sparse matrix acting on a Fock module, tagged with its Z2 parity.
///
/// `parity` is `None` for inhomogeneous operators (sums of even and odd parts);
/// graded brackets refuse such operands.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix<E> {
    dim: usize,
    parity: Option<Parity>,
    rows: Vec<SparseVec<E>>,
}

impl<E: Clone> OperatorMatrix<E> {
    pub fn zeros(dim: usize, parity: Option<Parity>) -> Self {
        OperatorMatrix {
            dim,
            parity,
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parity(&self) -> Option<Parity> {
        self.parity
    }

    pub fn with_parity(mut self, parity: Option<Parity>) -> Self {
        self.parity = parity;
        self
    }

    pub fn row(&self, r: usize) -> &[(usize, E)] {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&E> {
        let row = &self.rows[r];
        row.binary_search_by_key(&c, |(j, _)| *j)
            .ok()
            .map(|p| &row[p].1)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Nonzero entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &E)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    /// Columns grouped by row index, i.e. the transpose's rows: `cols[c]` lists `(r, value)`.
    pub fn columns(&self) -> Vec<SparseVec<E>> {
        let mut cols: Vec<SparseVec<E>> = vec![Vec::new(); self.dim];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                cols[*c].push((r, v.clone()));
            }
        }
        cols
    }

    /// Copy with every column `c` where `!keep[c]` zeroed.
    pub fn retain_columns(&self, keep: &[bool]) -> Self {
        OperatorMatrix {
            dim: self.dim,
            parity: self.parity,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().filter(|(c, _)| keep[*c]).cloned().collect())
                .collect(),
        }
    }

    /// Converts entries to another backend, keeping structure and parity.
    pub fn map<G: Clone>(&self, mut f: impl FnMut(&E) -> G) -> OperatorMatrix<G> {
        OperatorMatrix {
            dim: self.dim,
            parity: self.parity,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(|(c, v)| (*c, f(v))).collect())
                .collect(),
        }
    }
}

impl<E: Clone + PartialEq> OperatorMatrix<E> {
    /// Builds from `(row, col, value)` triplets; duplicate positions are summed, zeros dropped.
    pub fn from_triplets<F: ScalarField<El = E>>(
        field: &F,
        dim: usize,
        parity: Option<Parity>,
        triplets: impl IntoIterator<Item = (usize, usize, E)>,
    ) -> Self {
        let mut rows: Vec<SparseVec<E>> = vec![Vec::new(); dim];
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) out of range for dim {dim}");
            rows[r].push((c, v));
        }
        for row in &mut rows {
            row.sort_by_key(|(c, _)| *c);
            let mut merged: SparseVec<E> = Vec::with_capacity(row.len());
            for (c, v) in row.drain(..) {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv = field.add(lv, &v),
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|(_, v)| !field.is_zero(v));
            *row = merged;
        }
        OperatorMatrix { dim, parity, rows }
    }

    pub fn identity<F: ScalarField<El = E>>(field: &F, dim: usize) -> Self {
        Self::diagonal(field, (0..dim).map(|_| field.one()).collect())
    }

    /// Even diagonal operator.
    pub fn diagonal<F: ScalarField<El = E>>(field: &F, diag: Vec<E>) -> Self {
        let dim = diag.len();
        Self::from_triplets(
            field,
            dim,
            Some(Parity::Even),
            diag.into_iter().enumerate().map(|(i, v)| (i, i, v)),
        )
    }

    pub fn diagonal_entries<F: ScalarField<El = E>>(&self, field: &F) -> Vec<E> {
        (0..self.dim)
            .map(|i| self.get(i, i).cloned().unwrap_or_else(|| field.zero()))
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(r, row)| row.iter().all(|(c, _)| *c == r))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    fn sum_parity(&self, other: &Self) -> Option<Parity> {
        if self.is_zero() {
            return other.parity;
        }
        if other.is_zero() {
            return self.parity;
        }
        match (self.parity, other.parity) {
            (Some(a), Some(b)) if a == b => Some(a),
            _ => None,
        }
    }

    pub fn add<F: ScalarField<El = E>>(&self, field: &F, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let parity = self.sum_parity(other);
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| merge_rows(field, a, b, false))
            .collect();
        Ok(OperatorMatrix {
            dim: self.dim,
            parity,
            rows,
        })
    }

    pub fn sub<F: ScalarField<El = E>>(&self, field: &F, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let parity = self.sum_parity(other);
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| merge_rows(field, a, b, true))
            .collect();
        Ok(OperatorMatrix {
            dim: self.dim,
            parity,
            rows,
        })
    }

    pub fn scale<F: ScalarField<El = E>>(&self, field: &F, s: &E) -> Self {
        if field.is_zero(s) {
            return Self::zeros(self.dim, self.parity);
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(c, v)| (*c, field.mul(v, s)))
                    .filter(|(_, v)| !field.is_zero(v))
                    .collect()
            })
            .collect();
        OperatorMatrix {
            dim: self.dim,
            parity: self.parity,
            rows,
        }
    }

    pub fn neg<F: ScalarField<El = E>>(&self, field: &F) -> Self {
        self.scale(field, &field.from_i64(-1))
    }

    /// Matrix product; parities add.
    pub fn mul<F: ScalarField<El = E>>(&self, field: &F, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let parity = match (self.parity, other.parity) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        let mut rows = Vec::with_capacity(self.dim);
        let mut acc: Vec<Option<E>> = vec![None; self.dim];
        let mut touched: Vec<usize> = Vec::new();
        for row in &self.rows {
            for (j, a) in row {
                for (c, b) in &other.rows[*j] {
                    let p = field.mul(a, b);
                    match &mut acc[*c] {
                        Some(v) => *v = field.add(v, &p),
                        slot => {
                            *slot = Some(p);
                            touched.push(*c);
                        }
                    }
                }
            }
            touched.sort_unstable();
            let out: SparseVec<E> = touched
                .drain(..)
                .filter_map(|c| {
                    let v = acc[c].take().expect("touched slot holds a value");
                    (!field.is_zero(&v)).then_some((c, v))
                })
                .collect();
            rows.push(out);
        }
        Ok(OperatorMatrix {
            dim: self.dim,
            parity,
            rows,
        })
    }

    /// Product of several matrices left to right.
    pub fn product<F: ScalarField<El = E>>(field: &F, factors: &[&Self]) -> Result<Self> {
        let (first, rest) = factors.split_first().expect("empty product");
        let mut acc = (*first).clone();
        for f in rest {
            acc = acc.mul(field, f)?;
        }
        Ok(acc)
    }

    pub fn pow<F: ScalarField<El = E>>(&self, field: &F, e: u32) -> Result<Self> {
        let mut acc = Self::identity(field, self.dim).with_parity(Some(Parity::Even));
        for _ in 0..e {
            acc = acc.mul(field, self)?;
        }
        if e > 0 {
            acc.parity = self.parity.map(|p| p * e);
        }
        Ok(acc)
    }

    /// Conjugate transpose.
    pub fn adjoint<F: ScalarField<El = E>>(&self, field: &F) -> Self {
        let cols = self.columns();
        OperatorMatrix {
            dim: self.dim,
            parity: self.parity,
            rows: cols
                .into_iter()
                .map(|col| col.into_iter().map(|(r, v)| (r, field.conj(&v))).collect())
                .collect(),
        }
    }

    /// Largest entry magnitude under the complex embedding.
    pub fn max_abs<F: ScalarField<El = E>>(&self, field: &F) -> f64 {
        self.rows
            .iter()
            .flat_map(|row| row.iter().map(|(_, v)| field.magnitude(v)))
            .fold(0.0, f64::max)
    }

    /// `left · self · right` for diagonal `left`, `right` given by their entries.
    pub fn conjugate_diagonal<F: ScalarField<El = E>>(&self, field: &F, left: &[E], right: &[E]) -> Self {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row.iter()
                    .map(|(c, v)| (*c, field.mul(&field.mul(&left[r], v), &right[*c])))
                    .filter(|(_, v)| !field.is_zero(v))
                    .collect()
            })
            .collect();
        OperatorMatrix {
            dim: self.dim,
            parity: self.parity,
            rows,
        }
    }

    /// Applies the matrix to a sparse vector.
    pub fn apply<F: ScalarField<El = E>>(&self, field: &F, v: &SparseVec<E>) -> SparseVec<E> {
        let cols = self.columns();
        let mut acc: std::collections::BTreeMap<usize, E> = std::collections::BTreeMap::new();
        for (j, x) in v {
            for (r, a) in &cols[*j] {
                let p = field.mul(a, x);
                acc.entry(*r)
                    .and_modify(|e| *e = field.add(e, &p))
                    .or_insert(p);
            }
        }
        acc.into_iter().filter(|(_, e)| !field.is_zero(e)).collect()
    }

    pub fn to_complex<F: ScalarField<El = E>>(&self, field: &F) -> OperatorMatrix<Complex64> {
        self.map(|v| field.to_complex(v))
    }
}

fn merge_rows<F: ScalarField>(field: &F, a: &[(usize, F::El)], b: &[(usize, F::El)], subtract: bool) -> Vec<(usize, F::El)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let v = if subtract { field.neg(&b[j].1) } else { b[j].1.clone() };
            out.push((b[j].0, v));
            j += 1;
        } else {
            let v = if subtract {
                field.sub(&a[i].1, &b[j].1)
            } else {
                field.add(&a[i].1, &b[j].1)
            };
            if !field.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Entrywise max |a - b| for matrices over the complex numbers.
pub fn max_difference(a: &OperatorMatrix<Complex64>, b: &OperatorMatrix<Complex64>) -> f64 {
    let dim = a.dim().max(b.dim());
    let mut worst: f64 = 0.0;
    for r in 0..dim {
        let (ra, rb) = (a.row(r), b.row(r));
        let (mut i, mut j) = (0, 0);
        while i < ra.len() || j < rb.len() {
            let d = if j >= rb.len() || (i < ra.len() && ra[i].0 < rb[j].0) {
                i += 1;
                ra[i - 1].1.norm()
            } else if i >= ra.len() || rb[j].0 < ra[i].0 {
                j += 1;
                rb[j - 1].1.norm()
            } else {
                i += 1;
                j += 1;
                (ra[i - 1].1 - rb[j - 1].1).norm()
            };
            worst = worst.max(d);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::{ComplexField, CyclotomicField};

    #[test]
    fn product_and_parity() {
        let f = CyclotomicField::new(3, 1).unwrap();
        let a = OperatorMatrix::from_triplets(&f, 3, Some(Parity::Odd), [(1, 0, f.one()), (2, 1, f.q_pow(1))]);
        let b = a.mul(&f, &a).unwrap();
        assert_eq!(b.parity(), Some(Parity::Even));
        assert_eq!(b.nnz(), 1);
        assert_eq!(b.get(2, 0), Some(&f.q_pow(1)));
        let cube = a.pow(&f, 3).unwrap();
        assert!(cube.is_zero());
        assert_eq!(a.pow(&f, 3).unwrap().parity(), Some(Parity::Odd));
    }

    #[test]
    fn dimension_mismatch() {
        let f = ComplexField::new(2, 1).unwrap();
        let a = OperatorMatrix::<Complex64>::identity(&f, 2);
        let b = OperatorMatrix::<Complex64>::identity(&f, 3);
        assert!(matches!(a.mul(&f, &b), Err(Error::DimensionMismatch { .. })));
        assert!(a.add(&f, &b).is_err());
    }

    #[test]
    fn mixed_parity_sum_is_inhomogeneous() {
        let f = ComplexField::new(2, 1).unwrap();
        let one = f.one();
        let even = OperatorMatrix::from_triplets(&f, 2, Some(Parity::Even), [(0, 0, one)]);
        let odd = OperatorMatrix::from_triplets(&f, 2, Some(Parity::Odd), [(1, 0, one)]);
        assert_eq!(even.add(&f, &odd).unwrap().parity(), None);
        let zero = OperatorMatrix::zeros(2, Some(Parity::Even));
        assert_eq!(zero.add(&f, &odd).unwrap().parity(), Some(Parity::Odd));
    }

    #[test]
    fn adjoint_conjugates() {
        let f = CyclotomicField::new(3, 1).unwrap();
        let a = OperatorMatrix::from_triplets(&f, 2, Some(Parity::Odd), [(1, 0, f.q_pow(1))]);
        let adj = a.adjoint(&f);
        assert_eq!(adj.get(0, 1), Some(&f.q_pow(-1)));
        assert_eq!(adj.adjoint(&f), a);
    }

    #[test]
    fn apply_matches_product() {
        let f = CyclotomicField::new(2, 1).unwrap();
        let a = OperatorMatrix::from_triplets(&f, 3, None, [(0, 1, f.from_i64(2)), (2, 1, f.q_pow(1)), (1, 2, f.one())]);
        let v = vec![(1, f.from_i64(3)), (2, f.one())];
        let got = a.apply(&f, &v);
        assert_eq!(got, vec![(0, f.from_i64(6)), (1, f.one()), (2, f.mul(&f.q_pow(1), &f.from_i64(3)))]);
    }
}
