//! Subcommand implementations. Every command resolves its output directory
//! from `--out-dir`, then `PRESSLAB_OUT_DIR`, then the working directory, and
//! writes deterministic primary outputs there.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use presslab_core::column::{axial_displacement, safety_check, stress_profile, AreaProfile, SafetyReport};
use presslab_core::curve::{
    aggregate, aggregate_csv_string, compute_test_speed, extract_properties, extract_properties_batch,
    generate_synthetic_record, to_stress_strain, AggregateStats, CompressionProperties,
    ExtractDiagnostics, ExtractOptions, RawTestRecord, SyntheticModel,
};
use presslab_core::model::{MaterialCard, PrintConfig, SpecimenGeometry};
use presslab_core::report::{
    build_comparison_table, comparison_csv_string, parse_comparison_csv, render_report, ComparisonRow,
    CurveSeries, Provenance, RenderFormats, Report,
};
use presslab_fem::analysis::{
    displacements_csv_string, run_static_analysis, summary, summary_json_string, AnalysisOptions, LoadCase,
};
use presslab_fem::msh::parse_msh_file;
use presslab_fem::sparse::SolveOptions;

use crate::failure::CliFailure;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "PRESSLAB_OUT_DIR";

fn resolve_out_dir(arg: Option<PathBuf>) -> PathBuf {
    arg.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn ensure_dir(dir: &Path) -> Result<(), CliFailure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliFailure::io(format!("cannot create output directory {}: {e}", dir.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliFailure> {
    std::fs::write(path, contents)
        .map_err(|e| CliFailure::io(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn extract_options(
    window: Option<usize>,
    r2_threshold: Option<f64>,
    drop_fraction: Option<f64>,
) -> ExtractOptions {
    let mut opts = ExtractOptions::default();
    if let Some(w) = window {
        opts.smooth_window = w;
    }
    if let Some(r2) = r2_threshold {
        opts.detect.r2_threshold = r2;
    }
    if let Some(drop) = drop_fraction {
        opts.drop_fraction = drop;
    }
    opts
}

fn options_map(opts: &ExtractOptions) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("smooth_window".into(), opts.smooth_window.to_string()),
        ("r2_threshold".into(), opts.detect.r2_threshold.to_string()),
        ("min_region_len".into(), opts.detect.min_region_len.to_string()),
        ("min_region_span_frac".into(), opts.detect.min_region_span_frac.to_string()),
        ("drop_fraction".into(), opts.drop_fraction.to_string()),
        ("stall_tol_rel".into(), opts.detect.stall_tol_rel.to_string()),
        ("confirm_drop_rel".into(), opts.detect.confirm_drop_rel.to_string()),
        ("yield_floor_frac".into(), opts.detect.yield_floor_frac.to_string()),
        ("steep_factor".into(), opts.detect.steep_factor.to_string()),
    ])
}

pub fn speed(height_mm: f64) -> Result<(), CliFailure> {
    let result = compute_test_speed(height_mm)?;
    let verdict = if result.compliant {
        "ASTM-compliant".to_string()
    } else {
        "outside ASTM band 1.0..1.6 mm/min".to_string()
    };
    println!("{:.3} mm/min ({verdict})", result.speed);
    Ok(())
}

#[derive(Serialize)]
struct AnalyzeOutput<'a> {
    label: &'a str,
    config: String,
    properties: CompressionProperties,
    diagnostics: &'a ExtractDiagnostics,
    options: BTreeMap<String, String>,
}

pub fn analyze(
    record_path: &Path,
    sidecar_path: &Path,
    out_dir: Option<PathBuf>,
    window: Option<usize>,
    r2_threshold: Option<f64>,
    drop_fraction: Option<f64>,
) -> Result<(), CliFailure> {
    let out_dir = resolve_out_dir(out_dir);
    ensure_dir(&out_dir)?;
    let record = RawTestRecord::from_paths(record_path, sidecar_path)?;
    let opts = extract_options(window, r2_threshold, drop_fraction);
    let extraction = extract_properties(&record, &opts)?;
    let output = AnalyzeOutput {
        label: &record.label,
        config: record.config.label(),
        properties: extraction.properties,
        diagnostics: &extraction.diagnostics,
        options: options_map(&opts),
    };
    let stem = record_path.file_stem().and_then(|s| s.to_str()).unwrap_or("record");
    let path = out_dir.join(format!("{stem}.properties.json"));
    write_file(&path, &(serde_json::to_string_pretty(&output)? + "\n"))
}

#[derive(Serialize)]
struct AggregateRow {
    config: String,
    stats: AggregateStats,
    labels: Vec<String>,
}

pub fn aggregate_cmd(
    records: &[PathBuf],
    out_dir: Option<PathBuf>,
    window: Option<usize>,
    r2_threshold: Option<f64>,
    drop_fraction: Option<f64>,
) -> Result<(), CliFailure> {
    let out_dir = resolve_out_dir(out_dir);
    ensure_dir(&out_dir)?;
    // Deterministic merge order regardless of shell expansion order.
    let mut paths: Vec<PathBuf> = records.to_vec();
    paths.sort();

    let mut loaded = Vec::with_capacity(paths.len());
    for path in &paths {
        let sidecar = path.with_extension("json");
        loaded.push(RawTestRecord::from_paths(path, &sidecar)?);
    }
    let opts = extract_options(window, r2_threshold, drop_fraction);
    let mut per_config: BTreeMap<PrintConfig, (Vec<CompressionProperties>, Vec<String>)> = BTreeMap::new();
    for (record, result) in loaded.iter().zip(extract_properties_batch(&loaded, &opts)) {
        let extraction = result.map_err(|e| {
            let failure: CliFailure = e.into();
            CliFailure { kind: failure.kind, message: format!("record `{}`: {}", record.label, failure) }
        })?;
        let entry = per_config.entry(record.config.canonical()).or_default();
        entry.0.push(extraction.properties);
        entry.1.push(record.label.clone());
    }

    let mut csv_rows = Vec::new();
    let mut json_rows = Vec::new();
    for config in presslab_core::model::enumerate_configs() {
        if let Some((props, labels)) = per_config.get(&config) {
            let stats = aggregate(props)?;
            csv_rows.push((config, stats));
            json_rows.push(AggregateRow { config: config.label(), stats, labels: labels.clone() });
        }
    }
    write_file(&out_dir.join("aggregate.csv"), &aggregate_csv_string(&csv_rows))?;
    write_file(&out_dir.join("aggregate.json"), &(serde_json::to_string_pretty(&json_rows)? + "\n"))
}

pub fn synth(
    model_path: &Path,
    diameter_mm: f64,
    height_mm: f64,
    config: &str,
    samples: usize,
    label: &str,
    out_dir: Option<PathBuf>,
) -> Result<(), CliFailure> {
    let out_dir = resolve_out_dir(out_dir);
    ensure_dir(&out_dir)?;
    let text = std::fs::read_to_string(model_path)
        .map_err(|e| CliFailure::io(format!("cannot read {}: {e}", model_path.display())))?;
    let model: SyntheticModel = serde_json::from_str(&text)?;
    let geometry = SpecimenGeometry::new(diameter_mm, height_mm)?;
    let config = PrintConfig::parse(config)?;
    let record = generate_synthetic_record(&model, &geometry, config, samples, label)?;
    write_file(&out_dir.join(format!("{label}.csv")), &record.to_csv_string())?;
    write_file(&out_dir.join(format!("{label}.json")), &(record.sidecar().to_json() + "\n"))
}

#[derive(Serialize)]
struct ColumnOutput {
    profile_anchors: Vec<(f64, f64)>,
    scale: f64,
    force_n: f64,
    stress_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    safety: Option<SafetyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    axial_displacement_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quadrature_panels: Option<usize>,
}

pub fn column(
    profile_path: &Path,
    force_n: f64,
    yield_stress_mpa: Option<f64>,
    youngs_modulus_mpa: Option<f64>,
    samples: usize,
    panels: usize,
    out_dir: Option<PathBuf>,
) -> Result<(), CliFailure> {
    let out_dir = resolve_out_dir(out_dir);
    ensure_dir(&out_dir)?;
    let profile = AreaProfile::from_path(profile_path)?;

    let field = stress_profile(&profile, force_n, samples.max(2))?;
    let mut csv = String::from("l_mm,stress_mpa\n");
    for (l, sigma) in &field {
        csv.push_str(&format!("{l},{sigma}\n"));
    }
    write_file(&out_dir.join("stress_profile.csv"), &csv)?;

    let safety = yield_stress_mpa
        .map(|ys| safety_check(&profile, force_n, ys, samples))
        .transpose()?;
    let displacement = youngs_modulus_mpa
        .map(|e| axial_displacement(&profile, force_n, e, panels))
        .transpose()?;

    if let Some(report) = &safety {
        println!(
            "max stress {:.4} MPa at l = {:.2} mm -> {}",
            report.max_stress,
            report.location,
            if report.safe { "SAFE" } else { "NOT SAFE" }
        );
    }
    if let Some(delta) = displacement {
        println!("axial displacement {delta:.6} mm");
    }

    let output = ColumnOutput {
        profile_anchors: profile.anchors().to_vec(),
        scale: profile.scale().linear_ratio,
        force_n,
        stress_samples: samples.max(2),
        safety,
        axial_displacement_mm: displacement,
        quadrature_panels: displacement.map(|_| panels),
    };
    write_file(&out_dir.join("column_report.json"), &(serde_json::to_string_pretty(&output)? + "\n"))
}

#[allow(clippy::too_many_arguments)]
pub fn fem(
    mesh_path: &Path,
    material_path: &Path,
    force_n: f64,
    direction: &str,
    load_face_set: &str,
    fixed_node_set: &str,
    tolerance: f64,
    max_iterations: usize,
    out_dir: Option<PathBuf>,
) -> Result<(), CliFailure> {
    let out_dir = resolve_out_dir(out_dir);
    ensure_dir(&out_dir)?;
    let mesh = parse_msh_file(mesh_path)?;
    let material = MaterialCard::from_path(material_path)?;

    let parts: Vec<f64> = direction
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliFailure::validation(format!("cannot parse direction `{direction}`")))?;
    if parts.len() != 3 {
        return Err(CliFailure::validation("direction must have three components `x,y,z`"));
    }
    let norm = (parts.iter().map(|p| p * p).sum::<f64>()).sqrt();
    if !(norm > 0.0) {
        return Err(CliFailure::validation("direction must be non-zero"));
    }

    let load_case = LoadCase {
        total_force: force_n,
        direction: [parts[0] / norm, parts[1] / norm, parts[2] / norm],
        loaded_face_set: load_face_set.to_string(),
        fixed_node_set: fixed_node_set.to_string(),
    };
    let opts = AnalysisOptions {
        solve: SolveOptions { rel_tolerance: tolerance, max_iterations },
    };
    let solution = run_static_analysis(&mesh, &material, &load_case, &opts)?;

    let s = summary(&solution);
    println!(
        "{} nodes, {} elements (avg quality {:.3}): max |u| = {:.6} mm, max von Mises = {:.4} MPa, equilibrium residual {:.2e}",
        s.n_nodes, s.n_elements, s.avg_element_quality, s.max_displacement_mm, s.max_von_mises_mpa,
        s.equilibrium_residual_rel
    );
    write_file(&out_dir.join("displacements.csv"), &displacements_csv_string(&mesh, &solution))?;
    write_file(&out_dir.join("summary.json"), &summary_json_string(&solution))
}

pub fn compare(input: &Path, out_dir: Option<PathBuf>) -> Result<(), CliFailure> {
    let out_dir = resolve_out_dir(out_dir);
    ensure_dir(&out_dir)?;
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliFailure::io(format!("cannot read {}: {e}", input.display())))?;
    let rows = parse_comparison_csv(&text)?;
    let table = build_comparison_table(&rows)?;
    let flagged = table.iter().filter(|r| !r.flags.is_empty()).count();
    println!("{} rows compared, {flagged} flagged", table.len());
    write_file(&out_dir.join("comparison.csv"), &comparison_csv_string(&table))?;
    write_file(&out_dir.join("comparison.json"), &(serde_json::to_string_pretty(&table)? + "\n"))
}

pub fn report(
    comparison: Option<&Path>,
    records: &[PathBuf],
    csv: bool,
    svg: bool,
    out_dir: Option<PathBuf>,
) -> Result<(), CliFailure> {
    let out_dir = resolve_out_dir(out_dir);
    ensure_dir(&out_dir)?;

    let mut inputs = Vec::new();
    let comparison_rows: Vec<ComparisonRow> = match comparison {
        Some(path) => {
            inputs.push(path.display().to_string());
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliFailure::io(format!("cannot read {}: {e}", path.display())))?;
            build_comparison_table(&parse_comparison_csv(&text)?)?
        }
        None => Vec::new(),
    };

    let mut curves = Vec::new();
    let mut sorted_records: Vec<PathBuf> = records.to_vec();
    sorted_records.sort();
    for path in &sorted_records {
        inputs.push(path.display().to_string());
        let record = RawTestRecord::from_paths(path, &path.with_extension("json"))?;
        let curve = to_stress_strain(&record)?;
        curves.push(CurveSeries {
            label: format!("{} stress-strain", record.label),
            x_label: "Strain [mm/mm]".into(),
            y_label: "Stress [MPa]".into(),
            points: curve.strains().iter().copied().zip(curve.stresses().iter().copied()).collect(),
        });
        curves.push(CurveSeries {
            label: format!("{} force-displacement", record.label),
            x_label: "Nominal displacement [mm]".into(),
            y_label: "Compression force [N]".into(),
            points: record.samples.clone(),
        });
    }

    let report = Report {
        provenance: Provenance {
            inputs,
            options: BTreeMap::from([
                ("csv".into(), csv.to_string()),
                ("svg".into(), svg.to_string()),
            ]),
            toolkit_version: env!("CARGO_PKG_VERSION").into(),
        },
        comparison: comparison_rows,
        curves,
        ..Default::default()
    };
    let written = render_report(&report, &out_dir, RenderFormats { csv, svg })?;
    for path in &written {
        println!("wrote {}", path.display());
    }

    // Volatile provenance lives in a sidecar so the primary outputs stay
    // byte-reproducible.
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let sidecar = serde_json::json!({
        "generated_unix_seconds": stamp,
        "command": std::env::args().collect::<Vec<_>>().join(" "),
    });
    std::fs::write(out_dir.join("provenance.json"), serde_json::to_string_pretty(&sidecar)? + "\n")
        .map_err(|e| CliFailure::io(e.to_string()))?;
    Ok(())
}
