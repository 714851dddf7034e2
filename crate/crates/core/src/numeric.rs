//! Small numeric kernels shared across the crate: least-squares lines,
//! composite Simpson quadrature, and monotone piecewise-cubic interpolation.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericError {
    #[error("least-squares fit needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("degenerate abscissa span (all x equal)")]
    DegenerateSpan,
    #[error("Simpson quadrature needs an even panel count >= 2, got {0}")]
    BadPanelCount(usize),
    #[error("interpolation needs strictly increasing knots")]
    UnsortedKnots,
    #[error("interpolation needs at least 2 knots, got {0}")]
    TooFewKnots(usize),
}

/// Result of a least-squares straight-line fit `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination. Defined as 1 for a constant ordinate
    /// (a horizontal line fits it exactly).
    pub r_squared: f64,
    pub n: usize,
}

/// Ordinary least squares over paired slices.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit, NumericError> {
    assert_eq!(xs.len(), ys.len(), "paired slices must have equal length");
    let n = xs.len();
    if n < 2 {
        return Err(NumericError::TooFewPoints(n));
    }
    let nf = n as f64;
    let mean_x = xs.iter().sum::<f64>() / nf;
    let mean_y = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return Err(NumericError::DegenerateSpan);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy <= 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(LineFit { slope, intercept, r_squared, n })
}

/// Composite Simpson rule over `[a, b]` with `n_panels` even panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n_panels: usize) -> Result<f64, NumericError> {
    if n_panels < 2 || n_panels % 2 != 0 {
        return Err(NumericError::BadPanelCount(n_panels));
    }
    let h = (b - a) / n_panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n_panels {
        let x = a + h * i as f64;
        acc += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    Ok(acc * h / 3.0)
}

/// Monotone-preserving piecewise-cubic Hermite interpolant
/// (Fritsch–Carlson slope limiting).
///
/// Interpolates every knot exactly, is C¹, and never overshoots between
/// knots: on each segment the interpolant stays within the bracketing knot
/// values, so a waisted area profile keeps its stated minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, NumericError> {
        assert_eq!(xs.len(), ys.len(), "knot slices must have equal length");
        let n = xs.len();
        if n < 2 {
            return Err(NumericError::TooFewKnots(n));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(NumericError::UnsortedKnots);
        }

        let mut secants = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            secants.push((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
        }

        let mut slopes = vec![0.0; n];
        slopes[0] = endpoint_slope(
            xs[1] - xs[0],
            if n > 2 { xs[2] - xs[1] } else { xs[1] - xs[0] },
            secants[0],
            if n > 2 { secants[1] } else { secants[0] },
        );
        slopes[n - 1] = endpoint_slope(
            xs[n - 1] - xs[n - 2],
            if n > 2 { xs[n - 2] - xs[n - 3] } else { xs[n - 1] - xs[n - 2] },
            secants[n - 2],
            if n > 2 { secants[n - 3] } else { secants[n - 2] },
        );
        for i in 1..n - 1 {
            let d_prev = secants[i - 1];
            let d_next = secants[i];
            if d_prev * d_next <= 0.0 {
                slopes[i] = 0.0;
            } else {
                let h_prev = xs[i] - xs[i - 1];
                let h_next = xs[i + 1] - xs[i];
                let w1 = 2.0 * h_next + h_prev;
                let w2 = h_next + 2.0 * h_prev;
                slopes[i] = (w1 + w2) / (w1 / d_prev + w2 / d_next);
            }
        }

        Ok(Self { xs, ys, slopes })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    /// Evaluate at `x`, which must lie within the knot span.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        debug_assert!(x >= self.xs[0] && x <= self.xs[n - 1]);
        // Find the segment containing x.
        let seg = match self.xs.binary_search_by(|probe| probe.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.ys[i],
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        let h = self.xs[seg + 1] - self.xs[seg];
        let t = (x - self.xs[seg]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[seg] + h10 * h * self.slopes[seg] + h01 * self.ys[seg + 1] + h11 * h * self.slopes[seg + 1]
    }
}

/// One-sided three-point slope with the standard Fritsch–Carlson clamps.
fn endpoint_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let slope = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if slope * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && slope.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        slope
    }
}
