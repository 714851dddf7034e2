//! Feature detection on stress–strain curves: the linear elastic region,
//! the compression modulus, and the yield and fracture points.

use crate::curve::reduce::StressStrainCurve;
use crate::curve::CurveError;
use crate::numeric::{fit_line, LineFit};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Tunables for the detection rules. The defaults are the values echoed into
/// report provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectOptions {
    /// Minimum coefficient of determination for the elastic region.
    pub r2_threshold: f64,
    /// Minimum number of points in the region.
    pub min_region_len: usize,
    /// Minimum strain span of the region as a fraction of the yield-strain
    /// estimate (the strain at the curve's stress maximum).
    pub min_region_span_frac: f64,
    /// "Stops increasing" tolerance for yield detection, relative to the
    /// current stress.
    pub stall_tol_rel: f64,
    /// Confirmation drop for yield detection, relative to the curve's
    /// stress maximum: the curve must fall this far below the candidate
    /// before it rises back above it.
    pub confirm_drop_rel: f64,
    /// Yield candidates below this fraction of the stress maximum are
    /// ignored: the yield is the maximum-stress onset, so seating-zone
    /// wiggles never qualify.
    pub yield_floor_frac: f64,
    /// Fracture "steeply negative" gate: local derivative must be below
    /// `-steep_factor` times the elastic slope for the threshold rule to
    /// fire; otherwise the terminal sample is reported.
    pub steep_factor: f64,
    /// Keep the region end this many samples clear of the stress maximum.
    /// Smoothing bends the samples around the yield corner below the elastic
    /// line, so fitting into them tilts the modulus; the pipeline sets this
    /// to the smoothing window.
    pub end_guard: usize,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            r2_threshold: 0.999,
            min_region_len: 10,
            min_region_span_frac: 0.10,
            stall_tol_rel: 0.001,
            confirm_drop_rel: 0.01,
            yield_floor_frac: 0.5,
            steep_factor: 2.0,
            end_guard: 0,
        }
    }
}

/// Detected elastic region: an inclusive index window and its line fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearRegion {
    pub start: usize,
    pub end: usize,
    pub fit: LineFit,
}

impl LinearRegion {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy)]
struct WindowCandidate {
    quantized_r2: i64,
    len: usize,
    start: usize,
    end: usize,
}

impl WindowCandidate {
    /// Selection order: best quantized fit, then longer window, then smaller
    /// start index. R² is quantized to 1e-4 so floating-point dust cannot
    /// outrank a longer window with an equally good fit.
    fn key(&self) -> (i64, usize, std::cmp::Reverse<usize>) {
        (self.quantized_r2, self.len, std::cmp::Reverse(self.start))
    }
}

/// Finds the elastic region of a curve.
///
/// Every contiguous window with at least `min_region_len` points and a strain
/// span of at least `min_region_span_frac` of the yield-strain estimate is
/// scored by the R² of its least-squares line. Among windows with
/// R² at or above the threshold the winner has the best R² quantized to 1e-4,
/// with ties broken by the larger window and then the smaller start index:
/// on clean data every sub-window of the true linear stretch ties at R² = 1,
/// so the full stretch wins without bleeding into curved neighbours.
pub fn detect_linear_region(
    curve: &StressStrainCurve,
    opts: &DetectOptions,
) -> Result<LinearRegion, CurveError> {
    let n = curve.len();
    let min_len = opts.min_region_len.max(2);
    if n < min_len {
        return Err(CurveError::TooFewPoints { needed: min_len, got: n });
    }
    let strains = curve.strains();
    let stresses = curve.stresses();

    // Yield-strain estimate: strain at the (first) global stress maximum.
    // The elastic region rises towards the yield, so the search space ends
    // there; this keeps the fit off the plastic softening branch, which is
    // just as linear but slopes the wrong way.
    let mut max_i = 0;
    for i in 1..n {
        if stresses[i] > stresses[max_i] {
            max_i = i;
        }
    }
    let min_span = opts.min_region_span_frac * strains[max_i];
    let last_end = max_i.saturating_sub(opts.end_guard);
    if last_end + 1 < min_len {
        return Err(CurveError::LinearRegionNotFound {
            threshold: opts.r2_threshold,
            best_r_squared: 0.0,
        });
    }

    // Prefix sums over mean-shifted data keep the window moments stable.
    let mean_x = strains.iter().sum::<f64>() / n as f64;
    let mean_y = stresses.iter().sum::<f64>() / n as f64;
    let mut px = vec![0.0; n + 1];
    let mut py = vec![0.0; n + 1];
    let mut pxx = vec![0.0; n + 1];
    let mut pyy = vec![0.0; n + 1];
    let mut pxy = vec![0.0; n + 1];
    for i in 0..n {
        let x = strains[i] - mean_x;
        let y = stresses[i] - mean_y;
        px[i + 1] = px[i] + x;
        py[i + 1] = py[i] + y;
        pxx[i + 1] = pxx[i] + x * x;
        pyy[i + 1] = pyy[i] + y * y;
        pxy[i + 1] = pxy[i] + x * y;
    }

    let scan_start = |a: usize| -> (Option<WindowCandidate>, f64) {
        let mut best: Option<WindowCandidate> = None;
        let mut best_raw = f64::NEG_INFINITY;
        if a + min_len - 1 > last_end {
            return (None, best_raw);
        }
        for b in (a + min_len - 1)..=last_end {
            if strains[b] - strains[a] < min_span {
                continue;
            }
            let m = (b - a + 1) as f64;
            let sx = px[b + 1] - px[a];
            let sy = py[b + 1] - py[a];
            let sxx = (pxx[b + 1] - pxx[a]) - sx * sx / m;
            if sxx <= 0.0 {
                continue;
            }
            let syy = (pyy[b + 1] - pyy[a]) - sy * sy / m;
            let sxy = (pxy[b + 1] - pxy[a]) - sx * sy / m;
            if sxy <= 0.0 {
                continue; // the compression modulus region rises
            }
            let r2 = if syy <= 0.0 { 1.0 } else { ((sxy * sxy) / (sxx * syy)).min(1.0) };
            best_raw = best_raw.max(r2);
            if r2 + 1e-12 >= opts.r2_threshold {
                let cand = WindowCandidate {
                    quantized_r2: (r2 * 1e4).round() as i64,
                    len: b - a + 1,
                    start: a,
                    end: b,
                };
                if best.map_or(true, |cur| cand.key() > cur.key()) {
                    best = Some(cand);
                }
            }
        }
        (best, best_raw)
    };

    #[cfg(feature = "parallel")]
    let per_start: Vec<(Option<WindowCandidate>, f64)> = (0..n).into_par_iter().map(scan_start).collect();
    #[cfg(not(feature = "parallel"))]
    let per_start: Vec<(Option<WindowCandidate>, f64)> = (0..n).map(scan_start).collect();

    let mut best: Option<WindowCandidate> = None;
    let mut best_raw = f64::NEG_INFINITY;
    for (cand, raw) in per_start {
        best_raw = best_raw.max(raw);
        if let Some(c) = cand {
            if best.map_or(true, |cur| c.key() > cur.key()) {
                best = Some(c);
            }
        }
    }

    match best {
        Some(c) => {
            let fit = fit_line(&strains[c.start..=c.end], &stresses[c.start..=c.end])
                .map_err(|e| CurveError::Domain(e.to_string()))?;
            Ok(LinearRegion { start: c.start, end: c.end, fit })
        }
        None => Err(CurveError::LinearRegionNotFound {
            threshold: opts.r2_threshold,
            best_r_squared: if best_raw.is_finite() { best_raw } else { 0.0 },
        }),
    }
}

/// Compression modulus over an inclusive index window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusFit {
    /// Least-squares slope of stress vs strain [MPa]; the reported E_c.
    pub least_squares: f64,
    /// Endpoint stress/strain ratio over the same window, emitted for audit.
    /// Identical to the least-squares slope on exactly linear data.
    pub endpoint_ratio: f64,
    pub r_squared: f64,
}

/// Fits the compression modulus on `[start, end]` (inclusive).
pub fn youngs_modulus(
    curve: &StressStrainCurve,
    start: usize,
    end: usize,
) -> Result<ModulusFit, CurveError> {
    let n = curve.len();
    if start >= end || end >= n {
        return Err(CurveError::Domain(format!(
            "invalid region [{start}, {end}] for a curve of {n} points"
        )));
    }
    let strains = &curve.strains()[start..=end];
    let stresses = &curve.stresses()[start..=end];
    let span = strains[strains.len() - 1] - strains[0];
    if span <= 0.0 {
        return Err(CurveError::Domain("zero strain span in modulus region".into()));
    }
    let fit = fit_line(strains, stresses).map_err(|e| CurveError::Domain(e.to_string()))?;
    let endpoint_ratio = (stresses[stresses.len() - 1] - stresses[0]) / span;
    Ok(ModulusFit { least_squares: fit.slope, endpoint_ratio, r_squared: fit.r_squared })
}

/// A yield point: the first local stress maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YieldPoint {
    /// Index of the sample nearest the yield strain.
    pub index: usize,
    pub strain: f64,
    pub stress: f64,
}

/// Finds the first local maximum of stress: the first sample where the curve
/// stops increasing (within the stall tolerance) and subsequently falls by
/// the confirmation drop before ever rising back above the candidate.
///
/// A curve that is still rising at its last sample has no trusted yield and
/// is an error.
pub fn detect_yield(curve: &StressStrainCurve, opts: &DetectOptions) -> Result<YieldPoint, CurveError> {
    let n = curve.len();
    if n < 10 {
        return Err(CurveError::TooFewPoints { needed: 10, got: n });
    }
    let stresses = curve.stresses();
    let max_stress = stresses.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max_stress > 0.0) {
        return Err(CurveError::NoYield("curve has no positive stress".into()));
    }
    let abs_floor = 1e-12 * max_stress;

    // The confirmation drop scales with the curve's stress maximum so
    // low-stress wiggles in the seating region cannot fake a yield.
    let confirm = (opts.confirm_drop_rel * max_stress).max(abs_floor);
    let floor = opts.yield_floor_frac * max_stress;
    for i in 0..n - 1 {
        if stresses[i] < floor {
            continue;
        }
        let tau = (opts.stall_tol_rel * stresses[i].abs()).max(abs_floor);
        if stresses[i + 1] > stresses[i] + tau {
            continue; // still increasing
        }
        for j in i + 1..n {
            if stresses[j] > stresses[i] + tau {
                break; // resumed increasing: not a peak
            }
            if stresses[j] < stresses[i] - confirm {
                return Ok(YieldPoint { index: i, strain: curve.strains()[i], stress: stresses[i] });
            }
        }
    }
    Err(CurveError::NoYield(
        "stress keeps rising to the last sample; yield at the data end is not trusted".into(),
    ))
}

/// Sharpens a detected yield to sub-sample resolution with a two-segment
/// line fit around the candidate: the reported point is the intersection of
/// the rising and falling branches. Falls back to the candidate sample when
/// the window does not look like a corner (left slope not above right slope,
/// or the intersection escapes the window).
pub fn refine_yield(curve: &StressStrainCurve, candidate: usize, half_window: usize) -> YieldPoint {
    let n = curve.len();
    let fallback = YieldPoint {
        index: candidate,
        strain: curve.strains()[candidate],
        stress: curve.stresses()[candidate],
    };
    let lo = candidate.saturating_sub(half_window);
    let hi = (candidate + half_window).min(n - 1);
    if hi - lo + 1 < 7 {
        return fallback;
    }
    let strains = &curve.strains()[lo..=hi];
    let stresses = &curve.stresses()[lo..=hi];
    let m = strains.len();

    let sse = |fit: &LineFit, xs: &[f64], ys: &[f64]| -> f64 {
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| {
                let r = y - (fit.slope * x + fit.intercept);
                r * r
            })
            .sum()
    };

    // Disjoint split: samples [..=k] fit the rising branch, [k+1..] the
    // falling one, so a corner that lands between samples still yields two
    // uncontaminated fits.
    let mut best: Option<(f64, LineFit, LineFit)> = None;
    for k in 2..=m.saturating_sub(4) {
        let (Ok(left), Ok(right)) = (
            fit_line(&strains[..=k], &stresses[..=k]),
            fit_line(&strains[k + 1..], &stresses[k + 1..]),
        ) else {
            continue;
        };
        let total =
            sse(&left, &strains[..=k], &stresses[..=k]) + sse(&right, &strains[k + 1..], &stresses[k + 1..]);
        if best.as_ref().map_or(true, |(b, _, _)| total < *b) {
            best = Some((total, left, right));
        }
    }
    let Some((_, left, right)) = best else {
        return fallback;
    };
    if !(left.slope > right.slope) {
        return fallback;
    }
    let strain = (right.intercept - left.intercept) / (left.slope - right.slope);
    if !(strain >= strains[0] && strain <= strains[m - 1]) || !strain.is_finite() {
        return fallback;
    }
    let stress = left.slope * strain + left.intercept;
    // Nearest sample index to the refined strain.
    let mut index = lo;
    let mut best_dist = f64::INFINITY;
    for (offset, &e) in strains.iter().enumerate() {
        let d = (e - strain).abs();
        if d < best_dist {
            best_dist = d;
            index = lo + offset;
        }
    }
    YieldPoint { index, strain, stress }
}

/// Which rule produced the fracture point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FractureRule {
    /// The record ended (machine stop) before any steep collapse; the last
    /// sample is the fracture point. This is the dominant case.
    TerminalSample,
    /// Stress fell below `(1 - drop_fraction)·σ_yc` with a steeply negative
    /// local derivative.
    ThresholdSteepDrop,
}

/// Fracture point plus the rule that selected it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracturePoint {
    pub index: usize,
    pub strain: f64,
    pub stress: f64,
    pub rule: FractureRule,
}

/// Locates fracture after a detected yield.
///
/// Scans past the yield for the first sample whose stress is below
/// `(1 - drop_fraction)·σ_yc` *and* whose local stress derivative is steeply
/// negative (beyond `-steep_factor` times the elastic slope). Gradual
/// softening never trips the gate, so records that simply end return their
/// terminal sample.
///
/// `elastic_slope` is used for the steepness gate; when absent it is
/// estimated from the secant between half the yield strain and the yield.
pub fn detect_fracture(
    curve: &StressStrainCurve,
    yield_point: &YieldPoint,
    drop_fraction: f64,
    elastic_slope: Option<f64>,
    opts: &DetectOptions,
) -> Result<FracturePoint, CurveError> {
    let n = curve.len();
    if !(drop_fraction > 0.0 && drop_fraction < 1.0) {
        return Err(CurveError::Domain(format!(
            "drop_fraction must be in (0, 1), got {drop_fraction}"
        )));
    }
    if yield_point.index >= n || !(yield_point.stress > 0.0) {
        return Err(CurveError::InvalidYield(format!(
            "yield index {} / stress {} does not refer to a detected yield on this curve",
            yield_point.index, yield_point.stress
        )));
    }
    let strains = curve.strains();
    let stresses = curve.stresses();

    let slope_scale = elastic_slope.unwrap_or_else(|| {
        let half = yield_point.strain / 2.0;
        let mut k = 0;
        for (i, &e) in strains[..=yield_point.index].iter().enumerate() {
            if e <= half {
                k = i;
            }
        }
        let span = yield_point.strain - strains[k];
        if span > 0.0 {
            ((yield_point.stress - stresses[k]) / span).max(0.0)
        } else if yield_point.strain > 0.0 {
            yield_point.stress / yield_point.strain
        } else {
            0.0
        }
    });
    let steep_limit = -opts.steep_factor * slope_scale.max(0.0);
    let threshold = (1.0 - drop_fraction) * yield_point.stress;

    for i in yield_point.index + 1..n {
        if stresses[i] >= threshold {
            continue;
        }
        let (lo, hi) = (i.saturating_sub(1), (i + 1).min(n - 1));
        let span = strains[hi] - strains[lo];
        if span <= 0.0 {
            continue;
        }
        let derivative = (stresses[hi] - stresses[lo]) / span;
        if derivative <= steep_limit && steep_limit < 0.0 {
            return Ok(FracturePoint {
                index: i,
                strain: strains[i],
                stress: stresses[i],
                rule: FractureRule::ThresholdSteepDrop,
            });
        }
    }
    Ok(FracturePoint {
        index: n - 1,
        strain: strains[n - 1],
        stress: stresses[n - 1],
        rule: FractureRule::TerminalSample,
    })
}
