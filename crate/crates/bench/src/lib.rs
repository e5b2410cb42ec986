//! Shared fixtures for the benchmarks.

use pqheis_core::{build_rep, DeformationParams, GaugeSpec, StructureFunctionKind, TruncatedRep};

/// Nonstandard (p,q) representation at p = 1.1, q = 0.9 in the given gauge.
pub fn nonstandard_rep(dim: usize, gauge: GaugeSpec) -> TruncatedRep {
    let params = DeformationParams::new(1.1, 0.9).expect("valid parameters");
    build_rep(&StructureFunctionKind::NonstandardPQ, &params, &gauge, dim).expect("physical representation")
}

pub const DIMS: [usize; 3] = [16, 48, 128];
