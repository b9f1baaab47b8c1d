//! Root-of-unity Fock representations of the deformed Clifford superalgebra
//! and of the quantum superalgebras osp(2n+1|2m) and sl(m|n) built on it,
//! with exact cyclotomic and floating-point backends and relation checkers.

// `is_multiple_of` is newer than the supported toolchain
#![allow(clippy::manual_is_multiple_of)]
// scalar constructors need the field handle, so `from_*` takes `&self`
#![allow(clippy::wrong_self_convention)]

pub mod clifford;
pub mod cyclo;
pub mod decomp;
pub mod error;
pub mod export;
pub mod fock;
pub mod gram;
pub mod matrix;
pub mod osp;
pub mod qcore;
pub mod report;
pub mod slmn;

pub use clifford::{build_clifford, BasisKind, CliffordBundle, Ladder, Representation};
pub use cyclo::{Backend, ComplexField, CycloScalar, CyclotomicField, FloatScalar, ScalarField, Sign};
pub use decomp::DecompositionRecord;
pub use error::{Error, Result};
pub use fock::{FockModule, OccupationVector};
pub use matrix::OperatorMatrix;
pub use qcore::{GradingMap, Parity};
pub use report::{Provenance, VerificationReport, DEFAULT_TOLERANCE};
pub use slmn::Realization;
