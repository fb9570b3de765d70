//! Finite-volume simulation of a degenerate haptotaxis model of cancer
//! invasion on unstructured triangular meshes.
//!
//! The numerical core ([`mesh`], [`model`], [`solver`], [`diagnostics`],
//! [`initial_conditions`]) is generic over the floating-point type through
//! [`Scalar`]; the aliases below fix it to `f64`, which is what the file
//! formats and the command-line driver in [`simio`] use.

// `!(x > 0)` style comparisons are deliberate: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod format;
pub mod initial_conditions;
pub mod mesh;
pub mod model;
pub mod scalar;
pub mod simio;
pub mod solver;
pub mod state;

pub use scalar::Scalar;

pub type TriMesh = mesh::TriMesh<f64>;
pub type CellField = state::CellField<f64>;
pub type SimState = state::SimState<f64>;
pub type ModelParams = model::ModelParams<f64>;
pub type Solver<'m> = solver::Solver<'m, f64>;
pub type DiagnosticsRecord = diagnostics::DiagnosticsRecord<f64>;
