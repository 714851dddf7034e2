//! Experimental-vs-numerical comparison metrics, service-limit verification,
//! and deterministic report emission (JSON, CSV, SVG line charts).
//!
//! Published error columns are never ingested as truth: the toolkit
//! recomputes every metric from the displacement columns and flags rows whose
//! published values disagree beyond print precision. Primary outputs carry no
//! timestamps, so identical inputs yield byte-identical files; volatile
//! provenance (wall-clock, host) belongs in a sidecar, not here.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::column::SafetyReport;
use crate::curve::AggregateStats;
use crate::model::{enumerate_configs, PrintConfig};

/// Disagreement tolerance against published absolute errors [mm]: half the
/// print precision of three decimals.
pub const PUBLISHED_ABS_TOL: f64 = 5e-4;
/// Disagreement tolerance against published relative errors [%]: half the
/// print precision of two decimals.
pub const PUBLISHED_REL_TOL: f64 = 5e-3;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{0}")]
    Domain(String),
    #[error("report I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("report JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("comparison CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

/// Absolute and relative error between an experimental and a numerical
/// displacement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    pub experimental: f64,
    pub numerical: f64,
    /// |experimental − numerical|, exactly.
    pub absolute_error: f64,
    /// 100 · absolute_error / |experimental|.
    pub relative_error_pct: f64,
    /// Audit column with the numerical value as denominator.
    pub relative_error_vs_numerical_pct: f64,
}

/// Recomputes the error metrics from the two displacement values.
pub fn compare_displacement(experimental: f64, numerical: f64) -> Result<ErrorMetrics, ReportError> {
    if experimental == 0.0 || !experimental.is_finite() {
        return Err(ReportError::Domain(format!(
            "relative error undefined for experimental displacement {experimental}"
        )));
    }
    if !numerical.is_finite() {
        return Err(ReportError::Domain(format!("numerical displacement {numerical} is not finite")));
    }
    let absolute_error = (experimental - numerical).abs();
    Ok(ErrorMetrics {
        experimental,
        numerical,
        absolute_error,
        relative_error_pct: 100.0 * absolute_error / experimental.abs(),
        relative_error_vs_numerical_pct: if numerical != 0.0 {
            100.0 * absolute_error / numerical.abs()
        } else {
            f64::NAN
        },
    })
}

/// Service-limit verdict: the measured capacity must strictly exceed the
/// required load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServiceLimitResult {
    pub measured_f_max: f64,
    pub required: f64,
    pub pass: bool,
    /// required / measured.
    pub utilization: f64,
}

/// Default service load [N].
pub const DEFAULT_SERVICE_LOAD: f64 = 1000.0;

pub fn service_limit_check(f_max: f64, required: f64) -> Result<ServiceLimitResult, ReportError> {
    if !(f_max > 0.0) || !f_max.is_finite() {
        return Err(ReportError::Domain(format!("measured F_max must be positive, got {f_max}")));
    }
    if !(required > 0.0) || !required.is_finite() {
        return Err(ReportError::Domain(format!("required load must be positive, got {required}")));
    }
    Ok(ServiceLimitResult { measured_f_max: f_max, required, pass: f_max > required, utilization: required / f_max })
}

/// One input row for the comparison table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonInput {
    pub config: PrintConfig,
    pub experimental_mm: f64,
    pub numerical_mm: f64,
    /// Published absolute error, if any, to be checked, never trusted.
    pub published_absolute_mm: Option<f64>,
    /// Published relative error, if any, to be checked, never trusted.
    pub published_relative_pct: Option<f64>,
}

/// One recomputed comparison row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub config: String,
    pub axis: String,
    pub pattern: String,
    pub metrics: ErrorMetrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub published_absolute_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub published_relative_pct: Option<f64>,
    /// Discrepancy and duplicate flags; empty for clean rows.
    pub flags: Vec<String>,
}

/// Builds the comparison table: one recomputed row per input, ordered by the
/// canonical configuration enumeration (then input order). Duplicate
/// configuration classes are kept and flagged; published error columns that
/// disagree with the recomputation beyond print precision are flagged.
pub fn build_comparison_table(rows: &[ComparisonInput]) -> Result<Vec<ComparisonRow>, ReportError> {
    let order: Vec<PrintConfig> = enumerate_configs();
    let class_index = |config: PrintConfig| -> usize {
        let canonical = config.canonical();
        order.iter().position(|c| *c == canonical).unwrap_or(order.len())
    };

    let mut indexed: Vec<(usize, usize, &ComparisonInput)> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| (class_index(row.config), i, row))
        .collect();
    indexed.sort_by_key(|&(class, i, _)| (class, i));

    let mut class_counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &(class, _, _) in &indexed {
        *class_counts.entry(class).or_insert(0) += 1;
    }

    let mut out = Vec::with_capacity(rows.len());
    for &(class, _, input) in &indexed {
        let metrics = compare_displacement(input.experimental_mm, input.numerical_mm)?;
        let mut flags = Vec::new();
        if class_counts[&class] > 1 {
            flags.push("duplicate-config".to_string());
        }
        if let Some(published) = input.published_absolute_mm {
            if (metrics.absolute_error - published).abs() > PUBLISHED_ABS_TOL + 1e-12 {
                flags.push(format!(
                    "absolute-error-mismatch: recomputed {:.4} vs published {:.4}",
                    metrics.absolute_error, published
                ));
            }
        }
        if let Some(published) = input.published_relative_pct {
            if (metrics.relative_error_pct - published).abs() > PUBLISHED_REL_TOL + 1e-12 {
                flags.push(format!(
                    "relative-error-mismatch: recomputed {:.3} vs published {:.3}",
                    metrics.relative_error_pct, published
                ));
            }
        }
        out.push(ComparisonRow {
            config: input.config.label(),
            axis: input.config.axis.to_string(),
            pattern: input.config.pattern.to_string(),
            metrics,
            published_absolute_mm: input.published_absolute_mm,
            published_relative_pct: input.published_relative_pct,
            flags,
        });
    }
    Ok(out)
}

/// Parses a comparison CSV with header
/// `config,experimental_mm,numerical_mm` and optional
/// `published_absolute_mm,published_relative_pct` columns.
pub fn parse_comparison_csv(text: &str) -> Result<Vec<ComparisonInput>, ReportError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(text.as_bytes());
    {
        let headers = reader.headers()?;
        let expected = ["config", "experimental_mm", "numerical_mm"];
        for (i, want) in expected.iter().enumerate() {
            if headers.get(i).map(str::trim) != Some(*want) {
                return Err(ReportError::Domain(format!(
                    "expected comparison CSV header to start with `config,experimental_mm,numerical_mm`, got `{}`",
                    headers.iter().collect::<Vec<_>>().join(",")
                )));
            }
        }
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let field = |k: usize| record.get(k).map(str::trim).filter(|s| !s.is_empty());
        let parse = |s: &str, name: &str| -> Result<f64, ReportError> {
            s.parse::<f64>()
                .map_err(|_| ReportError::Domain(format!("row {}: cannot parse {name} `{s}`", i + 1)))
        };
        let config = PrintConfig::parse(
            field(0).ok_or_else(|| ReportError::Domain(format!("row {}: missing config", i + 1)))?,
        )?;
        let experimental = parse(
            field(1).ok_or_else(|| ReportError::Domain(format!("row {}: missing experimental", i + 1)))?,
            "experimental_mm",
        )?;
        let numerical = parse(
            field(2).ok_or_else(|| ReportError::Domain(format!("row {}: missing numerical", i + 1)))?,
            "numerical_mm",
        )?;
        let published_abs = field(3).map(|s| parse(s, "published_absolute_mm")).transpose()?;
        let published_rel = field(4).map(|s| parse(s, "published_relative_pct")).transpose()?;
        rows.push(ComparisonInput {
            config,
            experimental_mm: experimental,
            numerical_mm: numerical,
            published_absolute_mm: published_abs,
            published_relative_pct: published_rel,
        });
    }
    Ok(rows)
}

/// Renders the comparison table to CSV.
pub fn comparison_csv_string(rows: &[ComparisonRow]) -> String {
    let mut out = String::from(
        "config,axis,pattern,experimental_mm,numerical_mm,absolute_error_mm,\
         relative_error_pct,relative_error_vs_numerical_pct,\
         published_absolute_mm,published_relative_pct,flags\n",
    );
    for row in rows {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            row.config,
            row.axis,
            row.pattern,
            row.metrics.experimental,
            row.metrics.numerical,
            row.metrics.absolute_error,
            row.metrics.relative_error_pct,
            row.metrics.relative_error_vs_numerical_pct,
            opt(row.published_absolute_mm),
            opt(row.published_relative_pct),
            row.flags.join("; "),
        );
    }
    out
}

/// A curve to be plotted: labelled points plus axis captions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub label: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

/// One per-configuration property table entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyTableEntry {
    pub config: String,
    pub stats: AggregateStats,
}

/// Fixed provenance: inputs and resolved options. No timestamps here, so the
/// report stays byte-reproducible; volatile data belongs in a sidecar.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub inputs: Vec<String>,
    pub options: BTreeMap<String, String>,
    pub toolkit_version: String,
}

/// The full report document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub property_tables: Vec<PropertyTableEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comparison: Vec<ComparisonRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub safety: Option<SafetyReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub service_limits: Vec<ServiceLimitResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<CurveSeries>,
}

/// Output formats for [`render_report`]; JSON is always written.
#[derive(Debug, Clone, Copy, Default)]
pub struct RenderFormats {
    pub csv: bool,
    pub svg: bool,
}

/// Writes `report.json` (always), `comparison.csv` (when requested and rows
/// exist) and one SVG per curve series (when requested) into `out_dir`.
/// Returns the paths written. Identical reports produce byte-identical files.
pub fn render_report(
    report: &Report,
    out_dir: &Path,
    formats: RenderFormats,
) -> Result<Vec<PathBuf>, ReportError> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    let json_path = out_dir.join("report.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(report)? + "\n")?;
    written.push(json_path);

    if formats.csv && !report.comparison.is_empty() {
        let csv_path = out_dir.join("comparison.csv");
        std::fs::write(&csv_path, comparison_csv_string(&report.comparison))?;
        written.push(csv_path);
    }

    if formats.svg {
        for (i, series) in report.curves.iter().enumerate() {
            let name = format!("curve_{i:02}.svg");
            let svg_path = out_dir.join(&name);
            std::fs::write(&svg_path, svg_line_chart(series))?;
            written.push(svg_path);
        }
    }
    Ok(written)
}

/// Renders one series as a self-contained SVG line chart. Deterministic:
/// fixed canvas, fixed palette, fixed float formatting.
pub fn svg_line_chart(series: &CurveSeries) -> String {
    const W: f64 = 800.0;
    const H: f64 = 560.0;
    const ML: f64 = 80.0;
    const MR: f64 = 24.0;
    const MT: f64 = 48.0;
    const MB: f64 = 64.0;

    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &series.points {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if series.points.is_empty() {
        x_min = 0.0;
        x_max = 1.0;
        y_min = 0.0;
        y_max = 1.0;
    }
    if x_max <= x_min {
        x_max = x_min + 1.0;
    }
    if y_max <= y_min {
        y_max = y_min + 1.0;
    }
    let pad_x = 0.04 * (x_max - x_min);
    let pad_y = 0.04 * (y_max - y_min);
    let (x0, x1) = (x_min - pad_x, x_max + pad_x);
    let (y0, y1) = (y_min - pad_y, y_max + pad_y);

    let sx = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let sy = |y: f64| H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(svg, "  <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "  <text x=\"{:.1}\" y=\"28\" font-family=\"monospace\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        (ML + W - MR) / 2.0,
        xml_escape(&series.label)
    );

    // Axes.
    let _ = writeln!(
        svg,
        "  <line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{:.1}\" stroke=\"black\"/>",
        H - MB
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{ML}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
        H - MB,
        W - MR,
        H - MB
    );

    // Ticks and grid.
    const N_TICKS: usize = 5;
    for i in 0..=N_TICKS {
        let t = i as f64 / N_TICKS as f64;
        let xv = x0 + t * (x1 - x0);
        let yv = y0 + t * (y1 - y0);
        let xp = sx(xv);
        let yp = sy(yv);
        let _ = writeln!(
            svg,
            "  <line x1=\"{xp:.1}\" y1=\"{:.1}\" x2=\"{xp:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
            H - MB,
            H - MB + 6.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{xp:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            H - MB + 20.0,
            format_tick(xv)
        );
        let _ = writeln!(
            svg,
            "  <line x1=\"{:.1}\" y1=\"{yp:.1}\" x2=\"{ML}\" y2=\"{yp:.1}\" stroke=\"black\"/>",
            ML - 6.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            ML - 10.0,
            yp + 4.0,
            format_tick(yv)
        );
    }

    // Axis labels.
    let _ = writeln!(
        svg,
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
        (ML + W - MR) / 2.0,
        H - 16.0,
        xml_escape(&series.x_label)
    );
    let _ = writeln!(
        svg,
        "  <text x=\"20\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.1})\">{}</text>",
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0,
        xml_escape(&series.y_label)
    );

    // The polyline.
    if !series.points.is_empty() {
        let mut path = String::new();
        for &(x, y) in &series.points {
            let _ = write!(path, "{:.2},{:.2} ", sx(x), sy(y));
        }
        let _ = writeln!(
            svg,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\"/>",
            path.trim_end()
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.abs();
    if magnitude >= 1000.0 {
        format!("{v:.0}")
    } else if magnitude >= 1.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.4}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
