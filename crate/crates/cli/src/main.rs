//! Command-line front end: reproducible batch runs over the compression
//! toolkit. Eight subcommands mirror the workflow stages: characterize
//! (`speed`, `analyze`, `aggregate`, `synth`), design-check (`column`),
//! simulate (`fem`), compare (`compare`) and report (`report`).
//!
//! Exit codes: 0 ok, 2 usage, 3 input validation, 4 numerical failure
//! (non-convergence or detection failure), 5 I/O failure. The default output
//! directory comes from `PRESSLAB_OUT_DIR` (falling back to the working
//! directory); identical arguments plus identical inputs produce
//! byte-identical primary outputs.

mod commands;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use failure::{CliFailure, FailureKind};

#[derive(Parser)]
#[command(
    name = "presslab",
    version,
    about = "Compression-test reduction, 1-D design checks, and linear-elastic FEM for printed rPET parts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the standard crosshead speed 0.02·L_s and check the
    /// compliance band 1.3 ± 0.3 mm/min.
    Speed {
        /// Specimen height L_s [mm].
        #[arg(long, allow_negative_numbers = true)]
        height_mm: f64,
    },
    /// Reduce one record (CSV plus JSON sidecar) to its property quintet.
    Analyze {
        /// Record CSV with header `displacement_mm,force_N`.
        #[arg(long)]
        record: PathBuf,
        /// JSON sidecar with geometry and configuration.
        #[arg(long)]
        sidecar: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Smoothing window [samples], odd.
        #[arg(long)]
        window: Option<usize>,
        /// Minimum R² of the elastic region.
        #[arg(long)]
        r2_threshold: Option<f64>,
        /// Fracture drop fraction in (0, 1).
        #[arg(long)]
        drop_fraction: Option<f64>,
    },
    /// Reduce a batch of records and aggregate statistics per configuration.
    Aggregate {
        /// Record CSVs; each expects a sidecar next to it with the same stem
        /// and a `.json` extension.
        #[arg(long, num_args = 1.., required = true)]
        records: Vec<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        r2_threshold: Option<f64>,
        #[arg(long)]
        drop_fraction: Option<f64>,
    },
    /// Generate a synthetic record from a model file.
    Synth {
        /// Synthetic model JSON.
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 12.7)]
        diameter_mm: f64,
        #[arg(long, default_value_t = 50.8)]
        height_mm: f64,
        /// Configuration label, e.g. XY-Concentric.
        #[arg(long, default_value = "XY-Concentric")]
        config: String,
        #[arg(long, default_value_t = 400)]
        samples: usize,
        /// Output stem; writes <label>.csv and <label>.json.
        #[arg(long, default_value = "synthetic")]
        label: String,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Evaluate the 1-D column: stress profile, safety check, and the
    /// axial-displacement oracle.
    Column {
        /// Profile JSON (anchors, or design parameters plus scale).
        #[arg(long)]
        profile: PathBuf,
        /// Compression force [N].
        #[arg(long, allow_negative_numbers = true)]
        force_n: f64,
        /// Material yield stress [MPa] for the safety check.
        #[arg(long)]
        yield_stress_mpa: Option<f64>,
        /// Compression modulus [MPa] for the displacement oracle.
        #[arg(long)]
        youngs_modulus_mpa: Option<f64>,
        /// Stress-field stations (at least 1001 used for the safety check).
        #[arg(long, default_value_t = 1001)]
        samples: usize,
        /// Simpson panels for the displacement quadrature (even).
        #[arg(long, default_value_t = 1024)]
        panels: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run a linear-elastic static analysis on a mesh.
    Fem {
        /// Mesh in the ASCII interchange format.
        #[arg(long)]
        mesh: PathBuf,
        /// Material card JSON.
        #[arg(long)]
        material: PathBuf,
        /// Total load magnitude [N].
        #[arg(long, allow_negative_numbers = true)]
        force_n: f64,
        /// Load direction as `x,y,z` (normalized internally).
        #[arg(long, default_value = "0,0,-1")]
        direction: String,
        #[arg(long, default_value = "top")]
        load_face_set: String,
        #[arg(long, default_value = "base")]
        fixed_node_set: String,
        /// Solver relative-residual target.
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[arg(long, default_value_t = 20_000)]
        max_iterations: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Recompute comparison metrics from experimental/numerical columns.
    Compare {
        /// CSV with header `config,experimental_mm,numerical_mm` and
        /// optional published error columns.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Compose a report from analysis artifacts and emit JSON/CSV/SVG.
    Report {
        /// Comparison CSV (as accepted by `compare`).
        #[arg(long)]
        comparison: Option<PathBuf>,
        /// Record CSVs to plot; sidecars expected next to them.
        #[arg(long, num_args = 0..)]
        records: Vec<PathBuf>,
        /// Also write comparison.csv.
        #[arg(long)]
        csv: bool,
        /// Also write SVG charts.
        #[arg(long)]
        svg: bool,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap prints its own help/usage text; --help and --version are
            // successful outcomes, anything else is a usage error.
            let code = if err.use_stderr() { FailureKind::Usage.exit_code() } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.kind.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliFailure> {
    match cli.command {
        Command::Speed { height_mm } => commands::speed(height_mm),
        Command::Analyze { record, sidecar, out_dir, window, r2_threshold, drop_fraction } => {
            commands::analyze(&record, &sidecar, out_dir, window, r2_threshold, drop_fraction)
        }
        Command::Aggregate { records, out_dir, window, r2_threshold, drop_fraction } => {
            commands::aggregate_cmd(&records, out_dir, window, r2_threshold, drop_fraction)
        }
        Command::Synth { model, diameter_mm, height_mm, config, samples, label, out_dir } => {
            commands::synth(&model, diameter_mm, height_mm, &config, samples, &label, out_dir)
        }
        Command::Column { profile, force_n, yield_stress_mpa, youngs_modulus_mpa, samples, panels, out_dir } => {
            commands::column(&profile, force_n, yield_stress_mpa, youngs_modulus_mpa, samples, panels, out_dir)
        }
        Command::Fem {
            mesh,
            material,
            force_n,
            direction,
            load_face_set,
            fixed_node_set,
            tolerance,
            max_iterations,
            out_dir,
        } => commands::fem(
            &mesh,
            &material,
            force_n,
            &direction,
            &load_face_set,
            &fixed_node_set,
            tolerance,
            max_iterations,
            out_dir,
        ),
        Command::Compare { input, out_dir } => commands::compare(&input, out_dir),
        Command::Report { comparison, records, csv, svg, out_dir } => {
            commands::report(comparison.as_deref(), &records, csv, svg, out_dir)
        }
    }
}
