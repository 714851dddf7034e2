//! Core toolkit for characterizing printed rPET under uniaxial compression.
//!
//! The crate covers the data side of the workflow:
//!
//! - [`model`]: print-configuration taxonomy, specimen geometry, material
//!   cards, and scale factors. Units are fixed globally to mm, N and MPa
//!   (N/mm² ≡ MPa), so no conversion constants appear anywhere.
//! - [`curve`]: reduction of raw force–displacement records to stress–strain
//!   curves, extraction of the compressive property quintet
//!   (E_c, σ_yc, σ_fc, ε_yc, ε_fc), per-configuration statistics, and a
//!   seeded synthetic-record generator used as the extraction oracle.
//! - [`column`]: the 1-D variable-cross-section column model — area profiles,
//!   pointwise stress field, safety margin, and a Simpson-quadrature axial
//!   displacement oracle for cross-checking 3-D solvers.
//! - [`report`]: experimental-vs-numerical comparison metrics, service-limit
//!   checks, and deterministic report/plot emission.
//!
//! All values are immutable after construction and all operations are pure
//! functions of their inputs, so everything here is safe to share across
//! threads. Batch helpers fan out with rayon when the `parallel` feature
//! (default) is enabled and fall back to a sequential path otherwise; the
//! results are merged in input order either way, so output never depends on
//! the worker count.

pub mod column;
pub mod curve;
pub mod model;
pub mod numeric;
pub mod parallel;
pub mod report;

pub use model::{InfillPattern, MaterialCard, PrintAxis, PrintConfig, ScaleFactor, SpecimenGeometry};
