//! Runs the requested suites for one parameter point and assembles a report.

use anyhow::Result;
use rootfock_core::clifford::{verify_clifford_relations, verify_power_ladder};
use rootfock_core::decomp::{decompose_sl, module_irreducibility, structural_irreducibility, verify_decomposition};
use rootfock_core::fock::BASIS_ORDER;
use rootfock_core::gram::{build_gram, orthonormality_check, positivity_analysis, verify_gram};
use rootfock_core::osp::{build_osp, verify_osp};
use rootfock_core::qcore::verify_sum_identities;
use rootfock_core::report::{IndexTuple, ReportEntry};
use rootfock_core::slmn::{build_cartan_weyl, crosscheck_realizations, verify_sl};
use rootfock_core::{
    Backend, BasisKind, CliffordBundle, ComplexField, CyclotomicField, DecompositionRecord, FockModule, Provenance, ScalarField,
    VerificationReport,
};
use serde::Serialize;

use crate::config::{RunConfig, Suite};

/// Outcome of the exact Gram sign analysis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivitySummary {
    pub positive_definite: bool,
    /// The first basis vector (in basis order) with negative norm.
    pub first_negative: Option<String>,
    pub negative_count: usize,
    /// Positive definiteness is expected exactly when l = 1.
    pub expected_positive_definite: bool,
}

/// A verification report plus the structured results some suites produce.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    #[serde(flatten)]
    pub report: VerificationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positivity: Option<PositivitySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionRecord>,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.report.all_passed()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

fn wants(cfg: &RunConfig, s: Suite) -> bool {
    cfg.suites.contains(&s)
}

fn suite_for_bundle<F: ScalarField>(
    cfg: &RunConfig,
    bundle: &CliffordBundle<F>,
    out: &mut VerificationReport,
) -> Result<Option<DecompositionRecord>> {
    let tol = cfg.tolerance;
    let k = bundle.module().k();
    if wants(cfg, Suite::Clifford) {
        out.merge(verify_clifford_relations(bundle, tol));
        out.merge(verify_sum_identities(bundle.field(), 2 * k, tol));
        for p in 1..k {
            out.merge(verify_power_ladder(bundle, p, tol)?);
        }
    }
    // in the orthonormal basis the form is the identity; see orthonormality_check
    if wants(cfg, Suite::Gram) && bundle.basis() == BasisKind::Raw {
        out.merge(verify_gram(bundle, tol));
    }
    let needs_osp = wants(cfg, Suite::Osp) || wants(cfg, Suite::Sl);
    let osp = if needs_osp { Some(build_osp(bundle)?) } else { None };
    if wants(cfg, Suite::Osp) {
        out.merge(verify_osp(bundle, tol)?);
    }
    if let (true, Some(osp)) = (wants(cfg, Suite::Sl), &osp) {
        out.merge(verify_sl(osp, tol));
    }
    if wants(cfg, Suite::Decomp) {
        out.merge(module_irreducibility(bundle)?);
        let record = decompose_sl(&build_cartan_weyl(bundle), bundle.module())?;
        out.merge(verify_decomposition(&record));
        return Ok(Some(record));
    }
    Ok(None)
}

/// Builds the module and runs every requested suite on every requested backend.
///
/// The exact backend uses the raw basis. The float backend uses the
/// orthonormal basis when l = 1 and the raw basis otherwise.
pub fn run_point(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let p = cfg.params;
    let module = FockModule::new(p.m, p.n, p.k, p.l)?;
    let mut report = VerificationReport::new().with_provenance(Provenance {
        m: p.m,
        n: p.n,
        k: p.k,
        l: p.l,
        basis_order: BASIS_ORDER.to_string(),
        field_order: 8 * p.k,
    });
    let mut positivity = None;
    let mut exact_record = None;
    let mut float_record = None;

    if cfg.backend.exact() {
        let field = CyclotomicField::new(p.k, p.l)?;
        let bundle = CliffordBundle::raw(field.clone(), module.clone())?;
        exact_record = suite_for_bundle(cfg, &bundle, &mut report)?;
        if wants(cfg, Suite::Gram) {
            let gram = build_gram(&field, &module);
            let pa = positivity_analysis(&field, &module, &gram)?;
            let expected = p.l == 1;
            report.push(ReportEntry::predicate(
                "gram",
                "gram.unitarity_dichotomy",
                IndexTuple::new().at("l", p.l),
                Backend::Exact,
                pa.positive_definite == expected,
            ));
            positivity = Some(PositivitySummary {
                positive_definite: pa.positive_definite,
                first_negative: pa.first_negative.as_ref().map(ToString::to_string),
                negative_count: pa.rows.iter().filter(|r| r.sign == rootfock_core::Sign::Negative).count(),
                expected_positive_definite: expected,
            });
        }
        if wants(cfg, Suite::Decomp) {
            report.merge(structural_irreducibility(&bundle)?);
        }
    }

    if cfg.backend.float() {
        let bundle = if p.l == 1 {
            CliffordBundle::<ComplexField>::orthonormal(module.clone())?
        } else {
            CliffordBundle::raw(ComplexField::new(p.k, p.l)?, module.clone())?
        };
        float_record = suite_for_bundle(cfg, &bundle, &mut report)?;
        if wants(cfg, Suite::Gram) && p.l == 1 {
            report.merge(orthonormality_check(&bundle, cfg.tolerance)?);
        }
    }

    // the realization crosscheck compares exact and float matrices, so it runs once
    if wants(cfg, Suite::Sl) && p.l == 1 {
        let cw = build_cartan_weyl(&CliffordBundle::raw(CyclotomicField::new(p.k, 1)?, module.clone())?);
        report.merge(crosscheck_realizations(&cw, &module)?);
    }

    if let (Some(a), Some(b)) = (&exact_record, &float_record) {
        report.push(ReportEntry::predicate(
            "decomp",
            "decomp.backends_agree",
            IndexTuple::new(),
            Backend::Float,
            a == b,
        ));
    }

    report.sort();
    Ok(RunReport {
        report,
        positivity,
        decomposition: exact_record.or(float_record),
    })
}
