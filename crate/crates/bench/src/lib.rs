//! Shared fixtures for the benchmarks.

use rootfock_core::FockModule;

/// Parameter points (m, n, k, l) the benchmarks sweep, smallest first.
pub const POINTS: [(usize, usize, u32, u32); 3] = [(1, 1, 3, 1), (2, 1, 3, 1), (2, 2, 3, 1)];

pub fn module(p: (usize, usize, u32, u32)) -> FockModule {
    FockModule::new(p.0, p.1, p.2, p.3).expect("benchmark points are admissible")
}

pub fn label(p: (usize, usize, u32, u32)) -> String {
    format!("m{}n{}k{}l{}", p.0, p.1, p.2, p.3)
}
