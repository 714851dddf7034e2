//! Failure classification for exit codes: usage 2, input validation 3,
//! numerical 4, I/O 5.

use std::fmt;

use presslab_core::column::ColumnError;
use presslab_core::curve::CurveError;
use presslab_core::model::ModelError;
use presslab_core::report::ReportError;
use presslab_fem::FemError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Usage,
    Validation,
    Numerical,
    Io,
}

impl FailureKind {
    pub fn exit_code(self) -> u8 {
        match self {
            FailureKind::Usage => 2,
            FailureKind::Validation => 3,
            FailureKind::Numerical => 4,
            FailureKind::Io => 5,
        }
    }
}

#[derive(Debug)]
pub struct CliFailure {
    pub kind: FailureKind,
    pub message: String,
}

impl fmt::Display for CliFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl CliFailure {
    pub fn validation(message: impl Into<String>) -> Self {
        Self { kind: FailureKind::Validation, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { kind: FailureKind::Io, message: message.into() }
    }
}

impl From<std::io::Error> for CliFailure {
    fn from(err: std::io::Error) -> Self {
        Self::io(err.to_string())
    }
}

impl From<ModelError> for CliFailure {
    fn from(err: ModelError) -> Self {
        match err {
            ModelError::Io(e) => Self::io(e.to_string()),
            other => Self::validation(other.to_string()),
        }
    }
}

impl From<CurveError> for CliFailure {
    fn from(err: CurveError) -> Self {
        let kind = curve_kind(&err);
        Self { kind, message: err.to_string() }
    }
}

fn curve_kind(err: &CurveError) -> FailureKind {
    match err {
        CurveError::Io(_) => FailureKind::Io,
        CurveError::LinearRegionNotFound { .. } | CurveError::NoYield(_) => FailureKind::Numerical,
        CurveError::Stage { source, .. } => curve_kind(source),
        CurveError::Model(ModelError::Io(_)) => FailureKind::Io,
        _ => FailureKind::Validation,
    }
}

impl From<ColumnError> for CliFailure {
    fn from(err: ColumnError) -> Self {
        match err {
            ColumnError::Io(e) => Self::io(e.to_string()),
            other => Self::validation(other.to_string()),
        }
    }
}

impl From<ReportError> for CliFailure {
    fn from(err: ReportError) -> Self {
        match err {
            ReportError::Io(e) => Self::io(e.to_string()),
            other => Self::validation(other.to_string()),
        }
    }
}

impl From<FemError> for CliFailure {
    fn from(err: FemError) -> Self {
        match err {
            FemError::Io(e) => Self::io(e.to_string()),
            FemError::NonConvergence { .. } | FemError::NotSpd { .. } => {
                Self { kind: FailureKind::Numerical, message: err.to_string() }
            }
            FemError::Material(ModelError::Io(e)) => Self::io(e.to_string()),
            other => Self::validation(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliFailure {
    fn from(err: serde_json::Error) -> Self {
        Self::validation(format!("JSON: {err}"))
    }
}
