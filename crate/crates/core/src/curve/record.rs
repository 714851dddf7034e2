//! Raw force–displacement records and their on-disk form: a two-column CSV
//! plus a JSON sidecar with specimen geometry and configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curve::{CurveError, DISPLACEMENT_JITTER_TOL};
use crate::model::{PrintConfig, SpecimenGeometry};

/// Minimum number of samples a usable record must carry.
pub const MIN_SAMPLES: usize = 10;

/// Ordered force–displacement samples from one compression test.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTestRecord {
    /// `(displacement [mm], force [N])` in test order.
    pub samples: Vec<(f64, f64)>,
    pub geometry: SpecimenGeometry,
    pub config: PrintConfig,
    pub label: String,
}

impl RawTestRecord {
    pub fn new(
        samples: Vec<(f64, f64)>,
        geometry: SpecimenGeometry,
        config: PrintConfig,
        label: impl Into<String>,
    ) -> Result<Self, CurveError> {
        let record = Self { samples, geometry, config, label: label.into() };
        record.validate()?;
        Ok(record)
    }

    /// Checks the record invariants: sample count, finite forces, first
    /// displacement at or above zero, and displacements non-decreasing up to
    /// the machine jitter tolerance.
    pub fn validate(&self) -> Result<(), CurveError> {
        if self.samples.len() < MIN_SAMPLES {
            return Err(CurveError::TooFewPoints { needed: MIN_SAMPLES, got: self.samples.len() });
        }
        let first = self.samples[0].0;
        if !first.is_finite() || first < -DISPLACEMENT_JITTER_TOL {
            return Err(CurveError::Validation(format!("first displacement must be >= 0, got {first}")));
        }
        for (i, window) in self.samples.windows(2).enumerate() {
            let (d0, _) = window[0];
            let (d1, _) = window[1];
            if !d1.is_finite() {
                return Err(CurveError::Validation(format!("non-finite displacement at sample {}", i + 1)));
            }
            if d1 < d0 - DISPLACEMENT_JITTER_TOL {
                return Err(CurveError::Validation(format!(
                    "displacement reversal of {:.6} mm at sample {} exceeds the {DISPLACEMENT_JITTER_TOL} mm jitter tolerance",
                    d0 - d1,
                    i + 1,
                )));
            }
        }
        for (i, &(_, f)) in self.samples.iter().enumerate() {
            if !f.is_finite() {
                return Err(CurveError::Validation(format!("non-finite force at sample {i}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// CSV body with the `displacement_mm,force_N` header.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("displacement_mm,force_N\n");
        for &(d, f) in &self.samples {
            out.push_str(&format!("{d},{f}\n"));
        }
        out
    }

    pub fn sidecar(&self) -> RecordSidecar {
        RecordSidecar {
            diameter_mm: self.geometry.diameter,
            height_mm: self.geometry.height,
            axis: self.config.axis.to_string(),
            pattern: self.config.pattern.to_string(),
            label: self.label.clone(),
        }
    }

    /// Load a record from its CSV file and JSON sidecar.
    pub fn from_paths(record_path: &Path, sidecar_path: &Path) -> Result<Self, CurveError> {
        let sidecar: RecordSidecar = serde_json::from_str(&std::fs::read_to_string(sidecar_path)?)?;
        let csv_text = std::fs::read_to_string(record_path)?;
        Self::from_csv(&csv_text, &sidecar)
    }

    pub fn from_csv(csv_text: &str, sidecar: &RecordSidecar) -> Result<Self, CurveError> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(csv_text.as_bytes());
        {
            let headers = reader.headers()?;
            if headers.len() < 2 || &headers[0] != "displacement_mm" || &headers[1] != "force_N" {
                return Err(CurveError::Validation(format!(
                    "expected CSV header `displacement_mm,force_N`, got `{}`",
                    headers.iter().collect::<Vec<_>>().join(",")
                )));
            }
        }
        let mut samples = Vec::new();
        for (i, row) in reader.records().enumerate() {
            let row = row?;
            let parse = |field: &str, name: &str| -> Result<f64, CurveError> {
                field.trim().parse::<f64>().map_err(|_| {
                    CurveError::Validation(format!("row {}: cannot parse {name} `{field}`", i + 1))
                })
            };
            samples.push((parse(&row[0], "displacement_mm")?, parse(&row[1], "force_N")?));
        }
        let geometry = SpecimenGeometry::new(sidecar.diameter_mm, sidecar.height_mm)
            .map_err(|e| CurveError::Validation(e.to_string()))?;
        let config = PrintConfig::new(
            crate::model::PrintAxis::parse(&sidecar.axis)?,
            crate::model::InfillPattern::parse(&sidecar.pattern)?,
        );
        Self::new(samples, geometry, config, sidecar.label.clone())
    }
}

/// JSON sidecar describing one record file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordSidecar {
    pub diameter_mm: f64,
    pub height_mm: f64,
    pub axis: String,
    pub pattern: String,
    pub label: String,
}

impl RecordSidecar {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sidecar serializes")
    }
}
