//! Shared domain taxonomy: print configurations, specimen geometry, material
//! cards, and scale factors.
//!
//! Two printing directions and four infill patterns give eight nominal
//! configurations, but for cylindrical specimens printed along Z the ±45° and
//! 0°/90° raster patterns are geometrically equivalent under rotation, so the
//! taxonomy collapses them into a single class. The canonical representative
//! of the merged class is [`InfillPattern::Cross90`]; output headers spell
//! this out so downstream tables stay unambiguous.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while validating or loading domain values.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid {field}: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("unknown axis `{0}` (expected XY or Z)")]
    UnknownAxis(String),
    #[error("unknown infill pattern `{0}` (expected Concentric, ZigZag, Cross45 or Cross90)")]
    UnknownPattern(String),
    #[error("malformed config label `{0}` (expected <axis>-<pattern>, e.g. XY-Concentric)")]
    MalformedConfig(String),
    #[error("reading material card: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing material card: {0}")]
    Json(#[from] serde_json::Error),
}

/// Main printing direction of a part relative to the load axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PrintAxis {
    /// Layers stack perpendicular to the load direction.
    XY,
    /// Layers stack along the load direction.
    Z,
}

impl PrintAxis {
    pub const ALL: [PrintAxis; 2] = [PrintAxis::XY, PrintAxis::Z];

    pub fn parse(s: &str) -> Result<Self, ModelError> {
        match s.trim() {
            "XY" | "X/Y" | "xy" => Ok(PrintAxis::XY),
            "Z" | "z" => Ok(PrintAxis::Z),
            other => Err(ModelError::UnknownAxis(other.to_string())),
        }
    }
}

impl fmt::Display for PrintAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrintAxis::XY => write!(f, "XY"),
            PrintAxis::Z => write!(f, "Z"),
        }
    }
}

/// In-layer deposition trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum InfillPattern {
    Concentric,
    ZigZag,
    /// Alternating rasters at θ = −45°/45° between layers.
    Cross45,
    /// Alternating rasters at θ = 0°/90° between layers.
    Cross90,
}

impl InfillPattern {
    pub const ALL: [InfillPattern; 4] = [
        InfillPattern::Concentric,
        InfillPattern::ZigZag,
        InfillPattern::Cross45,
        InfillPattern::Cross90,
    ];

    pub fn parse(s: &str) -> Result<Self, ModelError> {
        match s.trim() {
            "Concentric" | "concentric" => Ok(InfillPattern::Concentric),
            "ZigZag" | "Zig-Zag" | "zigzag" | "zig-zag" => Ok(InfillPattern::ZigZag),
            "Cross45" | "cross45" | "-45/45" => Ok(InfillPattern::Cross45),
            "Cross90" | "cross90" | "0/90" => Ok(InfillPattern::Cross90),
            other => Err(ModelError::UnknownPattern(other.to_string())),
        }
    }
}

impl fmt::Display for InfillPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfillPattern::Concentric => write!(f, "Concentric"),
            InfillPattern::ZigZag => write!(f, "ZigZag"),
            InfillPattern::Cross45 => write!(f, "Cross45"),
            InfillPattern::Cross90 => write!(f, "Cross90"),
        }
    }
}

/// A manufacturing configuration: printing direction plus infill pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PrintConfig {
    pub axis: PrintAxis,
    pub pattern: InfillPattern,
}

impl PrintConfig {
    pub fn new(axis: PrintAxis, pattern: InfillPattern) -> Self {
        Self { axis, pattern }
    }

    /// Canonical form of this configuration: `(Z, Cross45)` maps to
    /// `(Z, Cross90)`, everything else is returned unchanged.
    pub fn canonical(self) -> Self {
        canonical_config(self.axis, self.pattern)
    }

    /// True when `canonical` would return `self` unchanged.
    pub fn is_canonical(self) -> bool {
        self.canonical() == self
    }

    /// Stable text label, e.g. `XY-Concentric`. Round-trips through
    /// [`PrintConfig::parse`].
    pub fn label(self) -> String {
        format!("{}-{}", self.axis, self.pattern)
    }

    pub fn parse(s: &str) -> Result<Self, ModelError> {
        let (axis, pattern) = s
            .split_once('-')
            .ok_or_else(|| ModelError::MalformedConfig(s.to_string()))?;
        Ok(Self::new(PrintAxis::parse(axis)?, InfillPattern::parse(pattern)?))
    }
}

impl fmt::Display for PrintConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.axis, self.pattern)
    }
}

/// Normalizes a configuration to its equivalence-class representative.
///
/// Cylindrical parts printed along Z are bodies of revolution, so the ±45°
/// and 0°/90° rasters produce equivalent structures; both map to the
/// `Cross90` representative. All other combinations are their own class.
pub fn canonical_config(axis: PrintAxis, pattern: InfillPattern) -> PrintConfig {
    match (axis, pattern) {
        (PrintAxis::Z, InfillPattern::Cross45) => PrintConfig::new(PrintAxis::Z, InfillPattern::Cross90),
        _ => PrintConfig::new(axis, pattern),
    }
}

/// The seven canonical configuration classes in deterministic order:
/// axis-major (XY before Z), patterns in declaration order with the merged
/// Z-axis cross class represented by `Cross90`.
pub fn enumerate_configs() -> Vec<PrintConfig> {
    let mut out = Vec::with_capacity(7);
    for axis in PrintAxis::ALL {
        for pattern in InfillPattern::ALL {
            let config = PrintConfig::new(axis, pattern);
            if config.is_canonical() {
                out.push(config);
            }
        }
    }
    out
}

/// Measured cylinder dimensions of one test specimen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecimenGeometry {
    /// Diameter of the circular section [mm].
    pub diameter: f64,
    /// Initial height L_s [mm].
    pub height: f64,
}

impl SpecimenGeometry {
    /// Nominal specimen size from the governing compression standard.
    pub const NOMINAL: SpecimenGeometry = SpecimenGeometry { diameter: 12.7, height: 50.8 };

    pub fn new(diameter: f64, height: f64) -> Result<Self, ModelError> {
        if !(diameter > 0.0) || !diameter.is_finite() {
            return Err(ModelError::Invalid {
                field: "diameter",
                message: format!("must be positive and finite, got {diameter}"),
            });
        }
        if !(height > 0.0) || !height.is_finite() {
            return Err(ModelError::Invalid {
                field: "height",
                message: format!("must be positive and finite, got {height}"),
            });
        }
        Ok(Self { diameter, height })
    }

    /// Circular cross-section area A = π·d²/4 [mm²].
    pub fn cross_section_area(&self) -> f64 {
        std::f64::consts::PI * self.diameter * self.diameter / 4.0
    }
}

/// Elastic material description used by the solvers and design checks.
///
/// `metadata` carries opaque provenance (printing parameters, filament
/// datasheet values); it is stored and echoed but never interpreted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialCard {
    pub name: String,
    #[serde(rename = "youngs_modulus_mpa")]
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    #[serde(rename = "yield_stress_mpa", default, skip_serializing_if = "Option::is_none")]
    pub yield_stress: Option<f64>,
    #[serde(rename = "density_g_cm3", default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl MaterialCard {
    pub fn new(name: impl Into<String>, youngs_modulus: f64, poisson_ratio: f64) -> Result<Self, ModelError> {
        let card = Self {
            name: name.into(),
            youngs_modulus,
            poisson_ratio,
            yield_stress: None,
            density: None,
            metadata: BTreeMap::new(),
        };
        card.validate()?;
        Ok(card)
    }

    pub fn with_yield_stress(mut self, yield_stress: f64) -> Self {
        self.yield_stress = Some(yield_stress);
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.youngs_modulus > 0.0) || !self.youngs_modulus.is_finite() {
            return Err(ModelError::Invalid {
                field: "youngs_modulus_mpa",
                message: format!("must be positive and finite, got {}", self.youngs_modulus),
            });
        }
        if !(0.0..0.5).contains(&self.poisson_ratio) {
            return Err(ModelError::Invalid {
                field: "poisson_ratio",
                message: format!("must satisfy 0 <= nu < 0.5, got {}", self.poisson_ratio),
            });
        }
        if let Some(ys) = self.yield_stress {
            if !(ys > 0.0) || !ys.is_finite() {
                return Err(ModelError::Invalid {
                    field: "yield_stress_mpa",
                    message: format!("must be positive and finite, got {ys}"),
                });
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let card: MaterialCard = serde_json::from_str(text)?;
        card.validate()?;
        Ok(card)
    }

    pub fn from_path(path: &Path) -> Result<Self, ModelError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        // Serialization of a validated card cannot fail.
        serde_json::to_string_pretty(self).expect("material card serializes")
    }
}

/// Linear reduction scale applied to a design, e.g. 0.25 for 1:4.
///
/// Lengths scale by the linear ratio, areas by its square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleFactor {
    pub linear_ratio: f64,
}

impl ScaleFactor {
    pub const FULL: ScaleFactor = ScaleFactor { linear_ratio: 1.0 };

    pub fn new(linear_ratio: f64) -> Result<Self, ModelError> {
        if !(linear_ratio > 0.0 && linear_ratio <= 1.0) {
            return Err(ModelError::Invalid {
                field: "linear_ratio",
                message: format!("must satisfy 0 < s <= 1, got {linear_ratio}"),
            });
        }
        Ok(Self { linear_ratio })
    }

    pub fn scale_length(&self, length: f64) -> f64 {
        length * self.linear_ratio
    }

    pub fn scale_area(&self, area: f64) -> f64 {
        area * self.linear_ratio * self.linear_ratio
    }
}
