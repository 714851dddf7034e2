//! Linear-elastic static finite-element analysis with 10-node quadratic
//! tetrahedra.
//!
//! The crate covers the full solver chain for small isotropic elastic
//! problems in mm/N/MPa units:
//!
//! - [`mesh`]: the tetrahedral mesh model, validation, and quality stats.
//! - [`msh`]: the ASCII mesh-interchange reader/writer (2.2-style sections).
//! - [`shape`]: quadratic tetrahedral shape functions and the 4-point Gauss
//!   rule.
//! - [`element`]: the isotropic elasticity matrix, strain-displacement
//!   matrices, and element stiffness.
//! - [`sparse`]: compressed sparse rows plus a Jacobi-preconditioned
//!   conjugate-gradient solver with a 1e-10 relative-residual contract.
//! - [`assembly`]: global assembly, consistent face loads, Dirichlet
//!   elimination with retained rows, and reaction recovery.
//! - [`recover`]: integration-point stress recovery, volume-weighted nodal
//!   averaging, and the Von Mises field.
//! - [`analysis`]: the one-call static analysis plus CSV/JSON output.
//! - [`meshgen`]: structured box and tapered-column test meshes.
//!
//! Element-level work runs element-parallel under the `parallel` feature with
//! results merged in fixed element order, and the solver's reductions are
//! ordered, so results are run-to-run deterministic either way.

pub mod analysis;
pub mod assembly;
pub mod element;
pub mod mesh;
pub mod meshgen;
pub mod msh;
pub mod recover;
pub mod shape;
pub mod sparse;

use thiserror::Error;

/// Errors raised by the solver chain.
#[derive(Debug, Error)]
pub enum FemError {
    #[error("mesh file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("element {element_id}: unsupported element type {element_type} (only 10-node tetrahedra, 6-node triangles and set-binding points are accepted)")]
    UnsupportedElementType { element_id: usize, element_type: i32 },
    #[error("invalid mesh at {entity}: {message}")]
    InvalidMesh { entity: String, message: String },
    #[error("{kind} set `{name}` not found or empty")]
    MissingSet { kind: &'static str, name: String },
    #[error("no boundary conditions: the constrained system would be singular")]
    NoBoundaryConditions,
    #[error("{0}")]
    Domain(String),
    #[error("solver did not reach relative residual {target:e} within {iterations} iterations (achieved {achieved:e})")]
    NonConvergence { target: f64, achieved: f64, iterations: usize },
    #[error("system is not positive definite (detected at iteration {iteration})")]
    NotSpd { iteration: usize },
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Material(#[from] presslab_core::model::ModelError),
}
