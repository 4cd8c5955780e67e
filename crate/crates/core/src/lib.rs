//! Excitation synthesis for wide-angle scanning antenna arrays.
//!
//! Finite arrays lose field of view because the active reflection seen at
//! each element degrades as the beam is steered. This crate treats the
//! problem on the excitation side: for every scan angle it co-minimizes the
//! total reflected power fraction and the inverse of the on-scan radiated
//! power density with a steady-state ε-dominance evolutionary optimizer,
//! then quantifies the resulting field of view against the standard
//! linear-phase baseline.
//!
//! Module map:
//! * [`array`] — array physics: geometry, scattering matrix, embedded
//!   element patterns, excitations and every power quantity.
//! * [`baseline`] — scan grids and the linear-phase reference excitations.
//! * [`moea`] — the generic steady-state ε-MOEA (population + ε-archive).
//! * [`synthesis`] — objective wiring, per-angle synthesis, trade-off
//!   selection, field-of-view analysis and beam metrics.
//! * [`io`] — Touchstone and pattern-grid file formats plus synthetic
//!   fixture generators.
//! * [`cli`] — configuration schema and the subcommand implementations
//!   behind the `widescan` binary.

pub mod array;
pub mod baseline;
pub mod cli;
pub mod io;
pub mod moea;
pub mod synthesis;

pub use array::{
    input_power, ArrayGeometry, ArrayModel, Direction, ExcitationSet, FeasibilityMode,
    ModelError, PhysicsConstants, ScatteringMatrix,
};
pub use baseline::{std_weights, ScanGrid};
pub use moea::{EpsilonSpec, MoeaConfig, ParetoArchive};
