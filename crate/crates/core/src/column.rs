//! The 1-D variable-cross-section column: parametric area profiles, the
//! pointwise compression stress field, the safety check against the material
//! yield stress, and a Simpson-quadrature axial-displacement oracle.
//!
//! The stress check is pointwise, σ(l) = F / A(l): the governing requirement
//! is that the compression stress never exceeds the elastic limit anywhere
//! along the length, and the maximum always sits at the minimum section (up
//! to sampling resolution).

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ScaleFactor;
use crate::numeric::{simpson, MonotoneCubic};

#[derive(Debug, Error)]
pub enum ColumnError {
    #[error("invalid {field}: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("axial position {position} outside the profile domain [0, {length}]")]
    OutOfDomain { position: f64, length: f64 },
    #[error("{0}")]
    Domain(String),
    #[error("profile I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("profile JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Geometric parameters of the waisted column design (full scale).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoolParams {
    /// Cross-section area at the base [mm²].
    pub base_area: f64,
    /// Minimum (waist) cross-section area [mm²].
    pub mid_area: f64,
    /// Circular cross-section area at the top [mm²].
    pub top_area: f64,
    /// Overall height [mm].
    pub height: f64,
    /// Top radius of the guide curve [mm]; stored, not used by the 1-D model.
    pub top_guide_radius: f64,
    /// Base radius of the guide curve [mm]; stored, not used by the 1-D model.
    pub base_guide_radius: f64,
    /// Straight length of the guide curve [mm]; stored, not used by the 1-D model.
    pub straight_guide_length: f64,
}

impl StoolParams {
    /// The design's published geometric parameters at 1:1 scale.
    pub const REFERENCE: StoolParams = StoolParams {
        base_area: 20452.7,
        mid_area: 2375.0,
        top_area: 48386.0,
        height: 640.0,
        top_guide_radius: 165.0,
        base_guide_radius: 253.0,
        straight_guide_length: 240.0,
    };

    pub fn validate(&self) -> Result<(), ColumnError> {
        let fields = [
            ("base_area", self.base_area),
            ("mid_area", self.mid_area),
            ("top_area", self.top_area),
            ("height", self.height),
            ("top_guide_radius", self.top_guide_radius),
            ("base_guide_radius", self.base_guide_radius),
            ("straight_guide_length", self.straight_guide_length),
        ];
        for (field, value) in fields {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ColumnError::Invalid {
                    field,
                    message: format!("must be positive and finite, got {value}"),
                });
            }
        }
        if !(self.mid_area < self.base_area && self.mid_area < self.top_area) {
            return Err(ColumnError::Invalid {
                field: "mid_area",
                message: "waisted column requires mid_area < base_area and mid_area < top_area".into(),
            });
        }
        Ok(())
    }
}

/// Cross-section area as a function of axial position `l ∈ [0, L]`.
///
/// Built from anchor points with a monotone-preserving piecewise cubic, so
/// the interpolant hits every anchor exactly, stays continuous, and never
/// dips below the smallest bracketing anchor (no spurious waists).
#[derive(Debug, Clone, PartialEq)]
pub struct AreaProfile {
    anchors: Vec<(f64, f64)>,
    spline: MonotoneCubic,
    scale: ScaleFactor,
    params: Option<StoolParams>,
}

impl AreaProfile {
    /// Builds a profile from explicit `(l, area)` anchors.
    pub fn from_anchors(anchors: Vec<(f64, f64)>, scale: ScaleFactor) -> Result<Self, ColumnError> {
        if anchors.len() < 2 {
            return Err(ColumnError::Invalid {
                field: "anchors",
                message: format!("need at least 2 anchors, got {}", anchors.len()),
            });
        }
        if anchors[0].0 != 0.0 {
            return Err(ColumnError::Invalid {
                field: "anchors",
                message: format!("first anchor must sit at l = 0, got {}", anchors[0].0),
            });
        }
        for &(l, a) in &anchors {
            if !l.is_finite() || !(a > 0.0) || !a.is_finite() {
                return Err(ColumnError::Invalid {
                    field: "anchors",
                    message: format!("anchor ({l}, {a}) must have finite l and positive area"),
                });
            }
        }
        let xs: Vec<f64> = anchors.iter().map(|&(l, _)| l).collect();
        let ys: Vec<f64> = anchors.iter().map(|&(_, a)| a).collect();
        let spline = MonotoneCubic::new(xs, ys).map_err(|e| ColumnError::Invalid {
            field: "anchors",
            message: e.to_string(),
        })?;
        Ok(Self { anchors, spline, scale, params: None })
    }

    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }

    pub fn scale(&self) -> ScaleFactor {
        self.scale
    }

    pub fn params(&self) -> Option<&StoolParams> {
        self.params.as_ref()
    }

    /// Axial length L [mm].
    pub fn length(&self) -> f64 {
        self.anchors.last().unwrap().0
    }

    /// Interpolated area at `l`; exact at anchors.
    pub fn area_at(&self, l: f64) -> Result<f64, ColumnError> {
        let length = self.length();
        if !(l >= 0.0 && l <= length) || !l.is_finite() {
            return Err(ColumnError::OutOfDomain { position: l, length });
        }
        Ok(self.spline.eval(l))
    }

    /// JSON form per the profile file schema.
    pub fn to_json(&self) -> String {
        let file = ProfileFile {
            anchors: self
                .anchors
                .iter()
                .map(|&(l, a)| ProfileAnchor { l_mm: l, area_mm2: a })
                .collect(),
            scale: self.scale.linear_ratio,
            params: self.params,
        };
        serde_json::to_string_pretty(&file).expect("profile serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ColumnError> {
        let file: ProfileFile = serde_json::from_str(text)?;
        let scale = ScaleFactor::new(file.scale).map_err(|e| ColumnError::Invalid {
            field: "scale",
            message: e.to_string(),
        })?;
        if let Some(params) = file.params {
            if file.anchors.is_empty() {
                return build_profile(&params, scale);
            }
        }
        let anchors = file.anchors.iter().map(|a| (a.l_mm, a.area_mm2)).collect();
        let mut profile = Self::from_anchors(anchors, scale)?;
        profile.params = file.params;
        Ok(profile)
    }

    pub fn from_path(path: &Path) -> Result<Self, ColumnError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileAnchor {
    l_mm: f64,
    area_mm2: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileFile {
    #[serde(default)]
    anchors: Vec<ProfileAnchor>,
    scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<StoolParams>,
}

/// Builds the column profile from the design parameters at a given scale.
///
/// Anchors sit at `l = 0` (base), `l = L/2` (waist) and `l = L` (top); areas
/// scale by the square of the linear ratio, lengths by the ratio itself. The
/// published tables give the three section areas but not their axial
/// stations, so the mid-height waist placement is this model's documented
/// assumption; use an explicit anchor file for sensitivity studies.
pub fn build_profile(params: &StoolParams, scale: ScaleFactor) -> Result<AreaProfile, ColumnError> {
    params.validate()?;
    let length = scale.scale_length(params.height);
    let anchors = vec![
        (0.0, scale.scale_area(params.base_area)),
        (length / 2.0, scale.scale_area(params.mid_area)),
        (length, scale.scale_area(params.top_area)),
    ];
    let mut profile = AreaProfile::from_anchors(anchors, scale)?;
    profile.params = Some(*params);
    Ok(profile)
}

/// Samples the compression stress field σ(l) = F / A(l) at `n_samples`
/// uniform stations including both endpoints.
pub fn stress_profile(
    profile: &AreaProfile,
    force: f64,
    n_samples: usize,
) -> Result<Vec<(f64, f64)>, ColumnError> {
    if !(force >= 0.0) || !force.is_finite() {
        return Err(ColumnError::Domain(format!("force must be >= 0, got {force}")));
    }
    if n_samples < 2 {
        return Err(ColumnError::Domain(format!("n_samples must be >= 2, got {n_samples}")));
    }
    let length = profile.length();
    let mut out = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let l = length * i as f64 / (n_samples - 1) as f64;
        out.push((l, force / profile.area_at(l)?));
    }
    Ok(out)
}

/// Outcome of the design safety check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafetyReport {
    /// Peak compression stress along the column [MPa].
    pub max_stress: f64,
    /// Axial position of the peak [mm]; ties resolve to the smallest l.
    pub location: f64,
    /// Material yield stress σ_ys [MPa].
    pub yield_stress: f64,
    /// σ_ys / max_stress; `None` under zero load.
    pub margin: Option<f64>,
    /// True iff `max_stress < yield_stress` (strict).
    pub safe: bool,
}

/// Evaluates the stress field on at least 1001 stations and compares the
/// peak against the material yield stress.
pub fn safety_check(
    profile: &AreaProfile,
    force: f64,
    yield_stress: f64,
    n_samples: usize,
) -> Result<SafetyReport, ColumnError> {
    if !(yield_stress > 0.0) || !yield_stress.is_finite() {
        return Err(ColumnError::Domain(format!("yield stress must be positive, got {yield_stress}")));
    }
    let field = stress_profile(profile, force, n_samples.max(1001))?;
    let mut max_stress = f64::NEG_INFINITY;
    let mut location = 0.0;
    for &(l, sigma) in &field {
        if sigma > max_stress {
            max_stress = sigma;
            location = l;
        }
    }
    Ok(SafetyReport {
        max_stress,
        location,
        yield_stress,
        margin: if max_stress > 0.0 { Some(yield_stress / max_stress) } else { None },
        safe: max_stress < yield_stress,
    })
}

/// Axial shortening of the column under a tip force:
/// δ = ∫ F / (E·A(l)) dl over [0, L], by composite Simpson quadrature.
pub fn axial_displacement(
    profile: &AreaProfile,
    force: f64,
    youngs_modulus: f64,
    n_panels: usize,
) -> Result<f64, ColumnError> {
    if !(force >= 0.0) || !force.is_finite() {
        return Err(ColumnError::Domain(format!("force must be >= 0, got {force}")));
    }
    if !(youngs_modulus > 0.0) || !youngs_modulus.is_finite() {
        return Err(ColumnError::Domain(format!(
            "youngs modulus must be positive, got {youngs_modulus}"
        )));
    }
    if n_panels < 2 || n_panels % 2 != 0 {
        return Err(ColumnError::Domain(format!(
            "n_panels must be even and >= 2, got {n_panels}"
        )));
    }
    let integrand = |l: f64| force / (youngs_modulus * self_area(profile, l));
    simpson(integrand, 0.0, profile.length(), n_panels).map_err(|e| ColumnError::Domain(e.to_string()))
}

/// Area lookup for quadrature stations; endpoint rounding may push a station
/// a ulp outside the domain, so clamp.
fn self_area(profile: &AreaProfile, l: f64) -> f64 {
    let clamped = l.clamp(0.0, profile.length());
    profile.area_at(clamped).expect("clamped position is in domain")
}
