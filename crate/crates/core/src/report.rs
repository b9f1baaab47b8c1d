//! Verification reports: one entry per checked identity and index tuple.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::cyclo::{Backend, ScalarField};
use crate::matrix::OperatorMatrix;

/// Default float tolerance for residual checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Report JSON schema version.
pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Status {
    #[serde(rename = "exact_zero")]
    ExactZero,
    #[serde(rename = "within_tolerance")]
    WithinTolerance,
    #[serde(rename = "FAILED")]
    Failed,
}

impl Status {
    pub fn passed(self) -> bool {
        self != Status::Failed
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::ExactZero => "exact_zero",
            Status::WithinTolerance => "within_tolerance",
            Status::Failed => "FAILED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Slot {
    name: &'static str,
    value: i64,
    sign: bool,
}

/// Named indices of one relation instance, e.g. `i=2,j=1,xi=+`.
///
/// Sign-valued slots hold ±1 and render as `+`/`-`. Ordering compares values
/// left to right, which is lexicographic for entries of the same relation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndexTuple(Vec<Slot>);

impl IndexTuple {
    pub fn new() -> Self {
        IndexTuple(Vec::new())
    }

    pub fn at(mut self, name: &'static str, value: impl Into<i64>) -> Self {
        self.0.push(Slot {
            name,
            value: value.into(),
            sign: false,
        });
        self
    }

    /// A ±1 slot.
    pub fn sign(mut self, name: &'static str, value: i64) -> Self {
        debug_assert!(value == 1 || value == -1);
        self.0.push(Slot {
            name,
            value,
            sign: true,
        });
        self
    }

    pub fn values(&self) -> Vec<i64> {
        self.0.iter().map(|s| s.value).collect()
    }
}

impl PartialOrd for IndexTuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IndexTuple {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = self.0.iter().map(|s| (s.name, s.value));
        let b = other.0.iter().map(|s| (s.name, s.value));
        a.cmp(b)
    }
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, s) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            if s.sign {
                write!(f, "{}={}", s.name, if s.value > 0 { '+' } else { '-' })?;
            } else {
                write!(f, "{}={}", s.name, s.value)?;
            }
        }
        Ok(())
    }
}

impl Serialize for IndexTuple {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportEntry {
    pub suite: String,
    pub relation_id: String,
    pub index_tuple: IndexTuple,
    pub backend: Backend,
    pub status: Status,
    pub residual: f64,
}

impl ReportEntry {
    /// Full identifier such as `osp.green.triple[i=2,j=1,xi=+,eta=-]`.
    pub fn id(&self) -> String {
        format!("{}[{}]", self.relation_id, self.index_tuple)
    }

    /// Entry for a yes/no check; exact integer or combinatorial facts use `Backend::Exact`.
    pub fn predicate(suite: &str, relation: &str, index: IndexTuple, backend: Backend, ok: bool) -> Self {
        let status = match (ok, backend) {
            (true, Backend::Exact) => Status::ExactZero,
            (true, Backend::Float) => Status::WithinTolerance,
            (false, _) => Status::Failed,
        };
        ReportEntry {
            suite: suite.to_string(),
            relation_id: relation.to_string(),
            index_tuple: index,
            backend,
            status,
            residual: if ok { 0.0 } else { 1.0 },
        }
    }

    fn sort_key(&self) -> (&str, &str, &IndexTuple, Backend) {
        (&self.suite, &self.relation_id, &self.index_tuple, self.backend)
    }
}

/// Parameters a report was produced for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub m: usize,
    pub n: usize,
    pub k: u32,
    pub l: u32,
    pub basis_order: String,
    pub field_order: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub summary: Summary,
    pub entries: Vec<ReportEntry>,
}

impl Default for VerificationReport {
    fn default() -> Self {
        VerificationReport {
            schema: REPORT_SCHEMA,
            provenance: None,
            summary: Summary::default(),
            entries: Vec::new(),
        }
    }
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn push(&mut self, entry: ReportEntry) {
        self.summary.total += 1;
        if entry.status.passed() {
            self.summary.passed += 1;
        } else {
            self.summary.failed += 1;
        }
        self.entries.push(entry);
    }

    /// Appends all entries of `other`, keeping this report's provenance.
    pub fn merge(&mut self, other: VerificationReport) {
        for e in other.entries {
            self.push(e);
        }
    }

    /// Sorts by suite, relation id, index tuple, backend. Stable, so equal keys keep insertion order.
    pub fn sort(&mut self) {
        self.entries.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| !e.status.passed())
    }

    /// Entries whose relation id starts with `prefix`.
    pub fn matching<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a ReportEntry> + 'a {
        self.entries.iter().filter(move |e| e.relation_id.starts_with(prefix))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Flat CSV: one row per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,relation_id,index_tuple,backend,status,residual\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},\"{}\",{},{},{:e}\n",
                e.suite, e.relation_id, e.index_tuple, e.backend, e.status, e.residual
            ));
        }
        out
    }
}

/// Collects residual checks for one suite over one scalar backend.
///
/// Exact backends pass only on a structurally zero residual. Float backends
/// pass when the largest entry magnitude is at most `tolerance`.
pub struct Checker<'a, F: ScalarField> {
    field: &'a F,
    suite: &'static str,
    tolerance: f64,
    report: VerificationReport,
}

impl<'a, F: ScalarField> Checker<'a, F> {
    pub fn new(field: &'a F, suite: &'static str, tolerance: f64) -> Self {
        Checker {
            field,
            suite,
            tolerance,
            report: VerificationReport::new(),
        }
    }

    pub fn field(&self) -> &F {
        self.field
    }

    fn record(&mut self, relation: &str, index: IndexTuple, zero: bool, residual: f64) {
        let backend = self.field.backend();
        let status = match backend {
            Backend::Exact if zero => Status::ExactZero,
            Backend::Float if residual <= self.tolerance => Status::WithinTolerance,
            _ => Status::Failed,
        };
        self.report.push(ReportEntry {
            suite: self.suite.to_string(),
            relation_id: relation.to_string(),
            index_tuple: index,
            backend,
            status,
            residual,
        });
    }

    /// Records a residual matrix that must vanish.
    pub fn zero(&mut self, relation: &str, index: IndexTuple, residual: &OperatorMatrix<F::El>) {
        let r = residual.max_abs(self.field);
        self.record(relation, index, residual.is_zero(), r);
    }

    /// Records `lhs == rhs`; a dimension mismatch is a failure with infinite residual.
    pub fn equal(&mut self, relation: &str, index: IndexTuple, lhs: &OperatorMatrix<F::El>, rhs: &OperatorMatrix<F::El>) {
        match lhs.sub(self.field, rhs) {
            Ok(d) => self.zero(relation, index, &d),
            Err(_) => self.record(relation, index, false, f64::INFINITY),
        }
    }

    pub fn scalar_equal(&mut self, relation: &str, index: IndexTuple, lhs: &F::El, rhs: &F::El) {
        let d = self.field.sub(lhs, rhs);
        let r = self.field.magnitude(&d);
        self.record(relation, index, self.field.is_zero(&d), r);
    }

    /// Records a predicate; `ok` maps to a zero residual.
    pub fn holds(&mut self, relation: &str, index: IndexTuple, ok: bool) {
        let entry = ReportEntry::predicate(self.suite, relation, index, self.field.backend(), ok);
        self.report.push(entry);
    }

    pub fn finish(self) -> VerificationReport {
        let mut r = self.report;
        r.sort();
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::{ComplexField, CyclotomicField};
    use crate::qcore::Parity;

    #[test]
    fn index_rendering_and_order() {
        let a = IndexTuple::new().at("i", 2).at("j", 1).sign("xi", 1).sign("eta", -1);
        assert_eq!(a.to_string(), "i=2,j=1,xi=+,eta=-");
        let b = IndexTuple::new().at("i", 2).at("j", 10);
        let c = IndexTuple::new().at("i", 10).at("j", 1);
        assert!(b < c, "numeric, not string, order");
    }

    #[test]
    fn exact_and_float_statuses() {
        let f = CyclotomicField::new(2, 1).unwrap();
        let mut ch = Checker::new(&f, "t", DEFAULT_TOLERANCE);
        let z = OperatorMatrix::zeros(2, Some(Parity::Even));
        let one = OperatorMatrix::identity(&f, 2);
        ch.zero("t.zero", IndexTuple::new(), &z);
        ch.zero("t.one", IndexTuple::new(), &one);
        let r = ch.finish();
        assert_eq!(r.summary, Summary { total: 2, passed: 1, failed: 1 });
        assert_eq!(r.entries[0].relation_id, "t.one");
        assert_eq!(r.entries[0].status, Status::Failed);
        assert_eq!(r.entries[1].status, Status::ExactZero);

        let g = ComplexField::new(2, 1).unwrap();
        let mut ch = Checker::new(&g, "t", 1e-10);
        let tiny = OperatorMatrix::from_triplets(&g, 1, None, [(0, 0, num_complex::Complex64::new(1e-12, 0.0))]);
        ch.zero("t.tiny", IndexTuple::new(), &tiny);
        assert_eq!(ch.finish().entries[0].status, Status::WithinTolerance);
    }

    #[test]
    fn json_uses_wire_names() {
        let f = CyclotomicField::new(2, 1).unwrap();
        let mut ch = Checker::new(&f, "s", DEFAULT_TOLERANCE);
        ch.holds("s.flag", IndexTuple::new().sign("xi", -1), false);
        let json = ch.finish().to_json();
        assert!(json.contains("\"FAILED\""));
        assert!(json.contains("\"xi=-\""));
        assert!(json.contains("\"schema\": 1"));
    }
}
