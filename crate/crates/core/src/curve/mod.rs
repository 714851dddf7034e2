//! Reduction of raw compression-test records to stress–strain curves and
//! the compressive property quintet (E_c, σ_yc, σ_fc, ε_yc, ε_fc).
//!
//! The pipeline mirrors the lab workflow: convert force–displacement samples
//! to nominal stress and strain, suppress measurement noise with a centered
//! moving average, remove the seating toe so the elastic fit extrapolates
//! through the origin, locate the linear region, fit the compression modulus,
//! and pick yield and fracture points off the curve. Every stage is also
//! exposed on its own so individual rules can be audited.
//!
//! Yield and fracture are reported on the raw (uncompensated) strain axis —
//! the same axis the testing machine records — while the modulus is fitted on
//! the toe-compensated curve. Reports carry the toe offset so either view can
//! be reconstructed.

mod detect;
mod extract;
mod record;
mod reduce;
mod synth;

pub use detect::{
    detect_fracture, detect_linear_region, detect_yield, refine_yield, youngs_modulus, DetectOptions,
    FracturePoint, FractureRule, LinearRegion, YieldPoint,
};
pub use extract::{
    aggregate, aggregate_csv_string, extract_properties, extract_properties_batch, prototype_features,
    AggregateStats, CompressionProperties, ExtractDiagnostics, ExtractOptions, Extraction, MeanStd,
    PrototypeFeatures,
};
pub use record::{RawTestRecord, RecordSidecar};
pub use reduce::{compute_test_speed, smooth, to_stress_strain, toe_compensate, StressStrainCurve, TestSpeed};
pub use synth::{generate_synthetic_record, SyntheticModel};

use thiserror::Error;

/// Largest backward displacement step accepted as machine jitter [mm].
/// Reversals beyond this reject the record.
pub const DISPLACEMENT_JITTER_TOL: f64 = 1e-3;

/// Errors raised by the curve engine.
#[derive(Debug, Error)]
pub enum CurveError {
    #[error("invalid record: {0}")]
    Validation(String),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("invalid smoothing window: {0}")]
    BadWindow(String),
    #[error("{0}")]
    Domain(String),
    #[error("no linear region with r-squared >= {threshold} (best found: {best_r_squared:.6})")]
    LinearRegionNotFound { threshold: f64, best_r_squared: f64 },
    #[error("no yield point: {0}")]
    NoYield(String),
    #[error("invalid yield reference: {0}")]
    InvalidYield(String),
    #[error("inconsistent synthetic model: {0}")]
    InconsistentModel(String),
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<CurveError>,
    },
    #[error("record I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("record CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("record sidecar: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

impl CurveError {
    pub(crate) fn at_stage(stage: &'static str) -> impl FnOnce(CurveError) -> CurveError {
        move |source| CurveError::Stage { stage, source: Box::new(source) }
    }
}
