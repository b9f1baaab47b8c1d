//! Lossless JSON persistence of Clifford generator matrices.
//!
//! Exact scalars are written as power-basis coefficients (`"p/q"` strings);
//! float scalars as `[re, im]` pairs rendered with 17 significant digits,
//! which round-trips every f64 bit for bit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{BasisKind, CliffordBundle, Representation};
use crate::cyclo::{Backend, ComplexField, CycloWire, CyclotomicField, ScalarField};
use crate::error::{Error, Result};
use crate::fock::{FockModule, ModuleKind, BASIS_ORDER};
use crate::matrix::OperatorMatrix;
use crate::qcore::Parity;
use crate::report::REPORT_SCHEMA;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WireScalar {
    Exact(CycloWire),
    Float([String; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorRecord {
    pub name: String,
    pub parity: Parity,
    pub triplets: Vec<(usize, usize, WireScalar)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub schema: u32,
    pub m: usize,
    pub n: usize,
    pub k: u32,
    pub l: u32,
    /// Bosonic occupation cap for truncated modules; absent for the quotient.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<u32>,
    pub backend: Backend,
    pub basis: BasisKind,
    pub basis_order: String,
    pub dim: usize,
    pub generators: Vec<GeneratorRecord>,
}

/// Parameters an import is expected to match.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpectedParams {
    pub m: usize,
    pub n: usize,
    pub k: u32,
    pub l: u32,
}

fn float_wire(z: &Complex64) -> WireScalar {
    WireScalar::Float([format!("{:.16e}", z.re), format!("{:.16e}", z.im)])
}

fn records<F: ScalarField>(bundle: &CliffordBundle<F>, enc: impl Fn(&F::El) -> WireScalar) -> Vec<GeneratorRecord> {
    bundle
        .generators()
        .into_iter()
        .map(|(name, m)| GeneratorRecord {
            name,
            parity: m.parity().unwrap_or(Parity::Even),
            triplets: m.triplets().map(|(r, c, v)| (r, c, enc(v))).collect(),
        })
        .collect()
}

pub fn export(rep: &Representation) -> MatrixFile {
    let module = rep.module();
    let generators = match rep {
        Representation::Exact(b) => records(b, |v| WireScalar::Exact(v.to_wire())),
        Representation::Float(b) => records(b, float_wire),
    };
    MatrixFile {
        schema: REPORT_SCHEMA,
        m: module.m(),
        n: module.n(),
        k: module.k(),
        l: module.l(),
        cap: match module.kind() {
            ModuleKind::Quotient => None,
            ModuleKind::Truncated { cap } => Some(cap),
        },
        backend: rep.backend(),
        basis: rep.basis(),
        basis_order: BASIS_ORDER.to_string(),
        dim: module.dim(),
        generators,
    }
}

pub fn to_json(file: &MatrixFile) -> String {
    serde_json::to_string_pretty(file).expect("matrix files always serialize")
}

fn parse_float(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Schema(format!("corrupted float coefficient {s:?}")))
}

/// Generator matrices grouped by kind, each indexed by mode.
type Generators<E> = (Vec<OperatorMatrix<E>>, Vec<OperatorMatrix<E>>, Vec<OperatorMatrix<E>>);

fn decode<F: ScalarField>(
    field: &F,
    module: &FockModule,
    file: &MatrixFile,
    dec: impl Fn(&WireScalar) -> Result<F::El>,
) -> Result<Generators<F::El>> {
    let modes = module.modes();
    if file.generators.len() != 3 * modes {
        return Err(Error::Schema(format!("expected {} generators, got {}", 3 * modes, file.generators.len())));
    }
    let (mut raise, mut lower, mut number) = (Vec::new(), Vec::new(), Vec::new());
    for (j, g) in file.generators.iter().enumerate() {
        let i = j / 3 + 1;
        let want = [format!("c{i}+"), format!("c{i}-"), format!("N{i}")];
        if g.name != want[j % 3] {
            return Err(Error::Schema(format!("generator {} should be named {}", g.name, want[j % 3])));
        }
        let mut triplets = Vec::with_capacity(g.triplets.len());
        for (r, c, v) in &g.triplets {
            if *r >= module.dim() || *c >= module.dim() {
                return Err(Error::Schema(format!("entry ({r}, {c}) outside dimension {}", module.dim())));
            }
            triplets.push((*r, *c, dec(v)?));
        }
        let m = OperatorMatrix::from_triplets(field, module.dim(), Some(g.parity), triplets);
        [&mut raise, &mut lower, &mut number][j % 3].push(m);
    }
    Ok((raise, lower, number))
}

/// Parses and rebuilds a bundle, rejecting schema or parameter mismatches.
pub fn import(json: &str, expected: Option<ExpectedParams>) -> Result<Representation> {
    let file: MatrixFile = serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))?;
    if file.schema != REPORT_SCHEMA {
        return Err(Error::Schema(format!("unsupported schema version {}", file.schema)));
    }
    if let Some(want) = expected {
        let got = ExpectedParams {
            m: file.m,
            n: file.n,
            k: file.k,
            l: file.l,
        };
        if got != want {
            return Err(Error::Schema(format!("file holds parameters {got:?}, expected {want:?}")));
        }
    }
    if file.basis_order != BASIS_ORDER {
        return Err(Error::Schema(format!("unknown basis order {:?}", file.basis_order)));
    }
    let module = match file.cap {
        None => FockModule::new(file.m, file.n, file.k, file.l)?,
        Some(cap) => FockModule::truncated(file.m, file.n, file.k, file.l, cap)?,
    };
    if module.dim() != file.dim {
        return Err(Error::Schema(format!("dimension {} does not match module dimension {}", file.dim, module.dim())));
    }
    match file.backend {
        Backend::Exact => {
            let field = CyclotomicField::new(file.k, file.l)?;
            let (raise, lower, number) = decode(&field, &module, &file, |w| match w {
                WireScalar::Exact(x) => field.from_wire(x),
                WireScalar::Float(_) => Err(Error::Schema("float coefficient in an exact file".into())),
            })?;
            Ok(Representation::Exact(CliffordBundle::from_parts(field, module, file.basis, raise, lower, number)?))
        }
        Backend::Float => {
            let field = ComplexField::new(file.k, file.l)?;
            let (raise, lower, number) = decode(&field, &module, &file, |w| match w {
                WireScalar::Float([re, im]) => Ok(Complex64::new(parse_float(re)?, parse_float(im)?)),
                WireScalar::Exact(_) => Err(Error::Schema("exact coefficient in a float file".into())),
            })?;
            Ok(Representation::Float(CliffordBundle::from_parts(field, module, file.basis, raise, lower, number)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::build_clifford;

    fn rep(m: usize, n: usize, k: u32, l: u32, backend: Backend, basis: BasisKind) -> Representation {
        build_clifford(FockModule::new(m, n, k, l).unwrap(), backend, basis).unwrap()
    }

    fn same(a: &Representation, b: &Representation) -> bool {
        match (a, b) {
            (Representation::Exact(x), Representation::Exact(y)) => {
                x.generators().iter().zip(y.generators()).all(|((n1, m1), (n2, m2))| n1 == &n2 && *m1 == m2)
            }
            (Representation::Float(x), Representation::Float(y)) => {
                x.generators().iter().zip(y.generators()).all(|((n1, m1), (n2, m2))| n1 == &n2 && *m1 == m2)
            }
            _ => false,
        }
    }

    #[test]
    fn exact_round_trip() {
        let r = rep(1, 1, 3, 1, Backend::Exact, BasisKind::Raw);
        let back = import(&to_json(&export(&r)), None).unwrap();
        assert!(same(&r, &back));
    }

    #[test]
    fn float_round_trip_is_bit_exact() {
        let r = rep(2, 1, 3, 1, Backend::Float, BasisKind::Orthonormal);
        let back = import(&to_json(&export(&r)), None).unwrap();
        assert!(same(&r, &back));
        assert_eq!(back.basis(), BasisKind::Orthonormal);
    }

    #[test]
    fn ladder_entry_count() {
        let f = export(&rep(1, 1, 2, 1, Backend::Exact, BasisKind::Raw));
        assert_eq!(f.generators[0].name, "c1+");
        assert_eq!(f.generators[0].triplets.len(), 2);
    }

    #[test]
    fn rejects_mismatches() {
        let json = to_json(&export(&rep(1, 1, 3, 1, Backend::Exact, BasisKind::Raw)));
        let want = ExpectedParams { m: 1, n: 1, k: 5, l: 1 };
        assert!(matches!(import(&json, Some(want)), Err(Error::Schema(_))));
        assert!(import(&json.replace("\"schema\": 1", "\"schema\": 2"), None).is_err());
        let corrupted = json.replacen("/1\"", "/x\"", 1);
        assert!(import(&corrupted, None).is_err());
        let fl = to_json(&export(&rep(1, 0, 3, 1, Backend::Float, BasisKind::Raw)));
        let bad = fl.replacen("e0\"", "e0z\"", 1);
        assert!(matches!(import(&bad, None), Err(Error::Schema(_))));
    }
}
