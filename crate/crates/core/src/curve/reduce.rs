//! Basic reductions: test-speed rule, stress–strain conversion, smoothing,
//! and toe compensation.

use crate::curve::detect::{detect_linear_region, DetectOptions};
use crate::curve::record::RawTestRecord;
use crate::curve::CurveError;
use crate::numeric::fit_line;

/// ASTM compliance band for the crosshead speed [mm/min]: 1.3 ± 0.3.
pub const SPEED_BAND: (f64, f64) = (1.0, 1.6);

/// Crosshead speed derived from the specimen height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestSpeed {
    /// 0.02 · L_s [mm/min].
    pub speed: f64,
    /// Whether the speed falls inside [`SPEED_BAND`].
    pub compliant: bool,
}

/// Computes the standard crosshead speed v = 0.02 · L_s and flags it against
/// the 1.3 ± 0.3 mm/min compliance band.
pub fn compute_test_speed(specimen_height: f64) -> Result<TestSpeed, CurveError> {
    if !(specimen_height > 0.0) || !specimen_height.is_finite() {
        return Err(CurveError::Domain(format!(
            "specimen height must be positive and finite, got {specimen_height}"
        )));
    }
    let speed = 0.02 * specimen_height;
    Ok(TestSpeed { speed, compliant: (SPEED_BAND.0..=SPEED_BAND.1).contains(&speed) })
}

/// Nominal stress–strain curve. Strains are non-decreasing and the point
/// count always matches the source record.
#[derive(Debug, Clone, PartialEq)]
pub struct StressStrainCurve {
    strains: Vec<f64>,
    stresses: Vec<f64>,
    /// Strain-axis shift applied by toe compensation; 0 for raw curves.
    pub toe_offset: f64,
}

impl StressStrainCurve {
    /// Builds a curve from parallel strain/stress slices. Strains must be
    /// non-decreasing.
    pub fn new(strains: Vec<f64>, stresses: Vec<f64>) -> Result<Self, CurveError> {
        if strains.len() != stresses.len() {
            return Err(CurveError::Validation(format!(
                "strain/stress length mismatch: {} vs {}",
                strains.len(),
                stresses.len()
            )));
        }
        if strains.windows(2).any(|w| w[1] < w[0]) {
            return Err(CurveError::Validation("strains must be non-decreasing".into()));
        }
        Ok(Self { strains, stresses, toe_offset: 0.0 })
    }

    pub fn len(&self) -> usize {
        self.strains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strains.is_empty()
    }

    pub fn strains(&self) -> &[f64] {
        &self.strains
    }

    pub fn stresses(&self) -> &[f64] {
        &self.stresses
    }

    pub fn point(&self, i: usize) -> (f64, f64) {
        (self.strains[i], self.stresses[i])
    }

    pub(crate) fn from_parts(strains: Vec<f64>, stresses: Vec<f64>, toe_offset: f64) -> Self {
        Self { strains, stresses, toe_offset }
    }
}

/// Converts a record to nominal stress and strain:
/// σ_i = F_i / (π·d²/4), ε_i = ΔL_i / L_s.
///
/// Sub-tolerance displacement jitter is monotonized so the resulting strains
/// are non-decreasing; larger reversals were already rejected by the record.
pub fn to_stress_strain(record: &RawTestRecord) -> Result<StressStrainCurve, CurveError> {
    record.validate()?;
    let area = record.geometry.cross_section_area();
    if !(area > 0.0) || !(record.geometry.height > 0.0) {
        return Err(CurveError::Domain("specimen geometry has zero diameter or height".into()));
    }
    let height = record.geometry.height;
    let mut strains = Vec::with_capacity(record.len());
    let mut stresses = Vec::with_capacity(record.len());
    let mut running = f64::NEG_INFINITY;
    for &(displacement, force) in &record.samples {
        running = running.max(displacement.max(0.0));
        strains.push(running / height);
        stresses.push(force / area);
    }
    Ok(StressStrainCurve::from_parts(strains, stresses, 0.0))
}

/// Centered moving average on stress with the given odd window; strains are
/// untouched. Endpoints use symmetric shrunken windows, so the first and last
/// samples pass through unchanged.
pub fn smooth(curve: &StressStrainCurve, window: usize) -> Result<StressStrainCurve, CurveError> {
    let n = curve.len();
    if window == 0 || window % 2 == 0 {
        return Err(CurveError::BadWindow(format!("window must be odd and >= 1, got {window}")));
    }
    if window > n {
        return Err(CurveError::BadWindow(format!("window {window} exceeds point count {n}")));
    }
    if window == 1 {
        return Ok(curve.clone());
    }
    let half = window / 2;
    let stresses = curve.stresses();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let h = half.min(i).min(n - 1 - i);
        let slice = &stresses[i - h..=i + h];
        out.push(slice.iter().sum::<f64>() / slice.len() as f64);
    }
    Ok(StressStrainCurve::from_parts(curve.strains().to_vec(), out, curve.toe_offset))
}

/// Removes the seating toe: fits the detected linear region, shifts the
/// strain axis by the fit's strain intercept, and clamps strains at zero.
/// Stresses are unchanged; the applied offset is stored on the curve.
pub fn toe_compensate(
    curve: &StressStrainCurve,
    opts: &DetectOptions,
) -> Result<StressStrainCurve, CurveError> {
    let region = detect_linear_region(curve, opts)?;
    let fit = fit_line(
        &curve.strains()[region.start..=region.end],
        &curve.stresses()[region.start..=region.end],
    )
    .map_err(|e| CurveError::Domain(e.to_string()))?;
    if !(fit.slope > 0.0) {
        return Err(CurveError::Domain(format!(
            "non-positive elastic slope {:.3} in detected region",
            fit.slope
        )));
    }
    let offset = -fit.intercept / fit.slope;
    let strains = curve.strains().iter().map(|&e| (e - offset).max(0.0)).collect();
    Ok(StressStrainCurve::from_parts(strains, curve.stresses().to_vec(), curve.toe_offset + offset))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{InfillPattern, PrintAxis, PrintConfig, SpecimenGeometry};
    use approx::assert_relative_eq;

    fn record_from(samples: Vec<(f64, f64)>) -> RawTestRecord {
        RawTestRecord::new(
            samples,
            SpecimenGeometry::NOMINAL,
            PrintConfig::new(PrintAxis::XY, InfillPattern::Concentric),
            "test",
        )
        .unwrap()
    }

    #[test]
    fn speed_for_nominal_specimen_is_compliant() {
        let v = compute_test_speed(50.8).unwrap();
        assert!((v.speed - 1.016).abs() < 1e-12);
        assert!(v.compliant);
    }

    #[test]
    fn speed_band_edges() {
        let v = compute_test_speed(65.0).unwrap();
        assert_relative_eq!(v.speed, 1.30, max_relative = 1e-12);
        assert!(v.compliant);

        let v = compute_test_speed(40.0).unwrap();
        assert_relative_eq!(v.speed, 0.80, max_relative = 1e-12);
        assert!(!v.compliant);
    }

    #[test]
    fn speed_rejects_nonpositive_height() {
        assert!(compute_test_speed(0.0).is_err());
        assert!(compute_test_speed(-3.0).is_err());
    }

    #[test]
    fn stress_strain_uses_nominal_area_and_height() {
        // A = pi * 12.7^2 / 4 = 126.677 mm^2, so 126.677 N maps to 1 MPa.
        let samples: Vec<(f64, f64)> =
            (0..=12).map(|i| (0.508 * i as f64 / 12.0, 126.677 * i as f64 / 12.0)).collect();
        let curve = to_stress_strain(&record_from(samples)).unwrap();
        assert_eq!(curve.len(), 13);
        assert_eq!(curve.point(0), (0.0, 0.0));
        let (eps, sigma) = curve.point(12);
        assert_relative_eq!(sigma, 1.0, max_relative = 2e-6);
        assert_relative_eq!(eps, 0.010, max_relative = 1e-12);
    }

    #[test]
    fn stress_scales_linearly_with_force() {
        let samples: Vec<(f64, f64)> = (0..20).map(|i| (i as f64 * 0.01, i as f64 * 7.3)).collect();
        let doubled: Vec<(f64, f64)> = samples.iter().map(|&(d, f)| (d, f * 2.0)).collect();
        let a = to_stress_strain(&record_from(samples)).unwrap();
        let b = to_stress_strain(&record_from(doubled)).unwrap();
        for i in 0..a.len() {
            assert_eq!(b.stresses()[i], 2.0 * a.stresses()[i]);
            assert_eq!(b.strains()[i], a.strains()[i]);
        }
    }

    #[test]
    fn smooth_window_one_is_identity() {
        let samples: Vec<(f64, f64)> = (0..15).map(|i| (i as f64 * 0.01, (i * i) as f64)).collect();
        let curve = to_stress_strain(&record_from(samples)).unwrap();
        assert_eq!(smooth(&curve, 1).unwrap(), curve);
    }

    #[test]
    fn smooth_preserves_constant_curves() {
        let samples: Vec<(f64, f64)> = (0..15).map(|i| (i as f64 * 0.01, 500.0)).collect();
        let curve = to_stress_strain(&record_from(samples)).unwrap();
        assert_eq!(smooth(&curve, 5).unwrap(), curve);
    }

    #[test]
    fn smooth_damps_alternating_noise_by_two_thirds() {
        let n = 41;
        let strains: Vec<f64> = (0..n).map(|i| i as f64 * 1e-3).collect();
        let line: Vec<f64> = strains.iter().map(|e| 2000.0 * e + 1.0).collect();
        let noisy: Vec<f64> =
            line.iter().enumerate().map(|(i, &s)| s + if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let curve = StressStrainCurve::new(strains, noisy).unwrap();
        let smoothed = smooth(&curve, 3).unwrap();
        // Interior points: mean of (+1, -1, +1) alternation is 1/3.
        for i in 1..n - 1 {
            let dev = (smoothed.stresses()[i] - line[i]).abs();
            assert_relative_eq!(dev, 1.0 / 3.0, max_relative = 1e-9);
        }
        // Endpoints shrink to a window of one and pass through.
        assert_relative_eq!((smoothed.stresses()[0] - line[0]).abs(), 1.0);
        assert_relative_eq!((smoothed.stresses()[n - 1] - line[n - 1]).abs(), 1.0);
    }

    #[test]
    fn smooth_rejects_bad_windows() {
        let samples: Vec<(f64, f64)> = (0..15).map(|i| (i as f64 * 0.01, i as f64)).collect();
        let curve = to_stress_strain(&record_from(samples)).unwrap();
        assert!(matches!(smooth(&curve, 4), Err(CurveError::BadWindow(_))));
        assert!(matches!(smooth(&curve, 17), Err(CurveError::BadWindow(_))));
    }

    #[test]
    fn toe_compensate_is_identity_for_line_through_origin() {
        let strains: Vec<f64> = (0..60).map(|i| i as f64 * 1e-3).collect();
        let stresses: Vec<f64> = strains.iter().map(|e| 1500.0 * e).collect();
        let curve = StressStrainCurve::new(strains, stresses).unwrap();
        let compensated = toe_compensate(&curve, &DetectOptions::default()).unwrap();
        assert!(compensated.toe_offset.abs() < 1e-12);
        for i in 0..curve.len() {
            assert_relative_eq!(compensated.strains()[i], curve.strains()[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn toe_compensate_removes_known_shift() {
        let strains: Vec<f64> = (0..60).map(|i| 0.002 + i as f64 * 1e-3).collect();
        let stresses: Vec<f64> = (0..60).map(|i| 1500.0 * (i as f64 * 1e-3)).collect();
        let curve = StressStrainCurve::new(strains, stresses).unwrap();
        let compensated = toe_compensate(&curve, &DetectOptions::default()).unwrap();
        assert_relative_eq!(compensated.toe_offset, 0.002, max_relative = 1e-9);
        for i in 0..curve.len() {
            assert_relative_eq!(compensated.strains()[i], i as f64 * 1e-3, epsilon = 1e-12);
        }
    }

    #[test]
    fn toe_compensate_needs_ten_points() {
        let strains: Vec<f64> = (0..5).map(|i| i as f64 * 1e-3).collect();
        let stresses: Vec<f64> = strains.iter().map(|e| 1500.0 * e).collect();
        let curve = StressStrainCurve::new(strains, stresses).unwrap();
        assert!(toe_compensate(&curve, &DetectOptions::default()).is_err());
    }
}
