//! Exact-diagonalization simulator for quantum annealing on small spin
//! networks.
//!
//! The pipeline interpolates a transverse-field driver into an Ising,
//! Heisenberg-XY or Dzyaloshinskii-Moriya target Hamiltonian defined on a
//! [`SpinGraph`], diagonalizes the instantaneous Hamiltonian on a grid of the
//! adiabatic parameter λ and records the energy gap, entanglement entropy,
//! mean magnetization, l1 coherence and fidelity of the ground state.

// `!(x <= tol)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anneal;
pub mod cli;
pub mod error;
pub mod graph;
pub mod io;
pub mod merits;
pub mod operators;
pub mod spectrum;

pub use anneal::{run_sweep, summarize, Execution, SweepConfig, SweepRecord, SweepResult, Summary};
pub use error::{Error, Result};
pub use graph::{CouplingVector, Edge, Preset, SpinGraph};
pub use merits::{Bipartition, LogBase, MeritSet};
pub use operators::{Axis, HermitianOperator, Model, ModelSpec, Trigger, TriggerKind};
pub use spectrum::{EigenSystem, QuantumState};
