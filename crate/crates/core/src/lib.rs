//! Truncated Fock-space laboratory for (p,q)-deformed Heisenberg algebras.
//!
//! A [`TruncatedRep`] realizes the ladder operators of a deformed oscillator
//! as dense matrices; position and momentum, metric operators, Hamiltonians
//! and the permutation rules for functions of N are built on top of it and
//! checked as interior residuals, each reported as a [`CheckReport`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod commutation;
pub mod dsf;
pub mod error;
pub mod eta;
pub mod fock;
pub mod hamiltonian;
pub mod heisenberg;
pub mod matrix;
pub mod params;
pub mod report;
pub mod suite;

pub use check::CheckReport;
pub use commutation::{a_k_eval, AkMethod, AkValue, FSpec, ShiftSign};
pub use dsf::{eval_dsf, validate_physical, PhysicalityReport, StructureFunctionKind};
pub use error::{Error, Result};
pub use eta::{derive_eta_closed_forms, ConjugationForm, EtaSpec};
pub use fock::{build_rep, build_rep_levels_only, GaugeSpec, TruncatedRep};
pub use hamiltonian::{build_h, build_h_tilde, spectrum, HamiltonianForm, SpectrumLevel, SpectrumTable};
pub use heisenberg::{MuFit, PositionMomentumPair};
pub use matrix::OperatorMatrix;
pub use params::DeformationParams;
pub use suite::{run_sweep, run_verify_suite, Requirement, SuiteReport, SweepConfig, SweepRange, SweepRecord, VerifyConfig};
