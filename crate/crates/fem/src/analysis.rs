//! The one-call static analysis: assembly, loads, constraints, solve, stress
//! recovery, reactions, and an equilibrium audit, plus CSV/JSON output of the
//! solution.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use presslab_core::model::MaterialCard;

use crate::assembly::{apply_dirichlet, assemble, distribute_face_load, DofConstraints};
use crate::mesh::{mesh_stats, Mesh, MeshStats};
use crate::recover::{recover_stress, StressField};
use crate::sparse::{solve_pcg, SolveOptions};
use crate::FemError;

/// A static load case: uniform traction totalling `total_force` on a face
/// set, with every node of `fixed_node_set` fully fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadCase {
    pub total_force: f64,
    /// Unit load direction; |direction| must be 1 within 1e-12.
    pub direction: [f64; 3],
    pub loaded_face_set: String,
    pub fixed_node_set: String,
}

impl LoadCase {
    pub fn validate(&self, mesh: &Mesh) -> Result<(), FemError> {
        let norm = (self.direction.iter().map(|d| d * d).sum::<f64>()).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(FemError::Domain(format!(
                "load direction must be a unit vector, |d| = {norm:.15}"
            )));
        }
        if !self.total_force.is_finite() {
            return Err(FemError::Domain("load magnitude must be finite".into()));
        }
        mesh.face_set(&self.loaded_face_set)?;
        mesh.node_set(&self.fixed_node_set)?;
        Ok(())
    }
}

/// Analysis tunables; the solver contract defaults to a 1e-10 relative
/// residual.
#[derive(Debug, Clone, Copy, Default)]
pub struct AnalysisOptions {
    pub solve: SolveOptions,
}

/// Complete solved state of one static analysis.
#[derive(Debug, Clone)]
pub struct FemSolution {
    /// Per node (u, v, w) [mm].
    pub displacements: Vec<[f64; 3]>,
    pub stress: StressField,
    /// Per fixed node (Rx, Ry, Rz) [N], keyed by node index.
    pub reactions: Vec<(usize, [f64; 3])>,
    pub max_displacement_magnitude: f64,
    /// Maximum Von Mises over integration points (conservative headline).
    pub max_von_mises: f64,
    /// Maximum of the smoothed nodal Von Mises field.
    pub max_von_mises_nodal: f64,
    pub reaction_sum: [f64; 3],
    pub applied_load: [f64; 3],
    /// |Σ reactions + applied| / |applied|.
    pub equilibrium_residual_rel: f64,
    pub solver_iterations: usize,
    pub solver_residual: f64,
    pub mesh_stats: MeshStats,
}

/// Runs assembly → loads → constraints → solve → recovery → reactions for a
/// face-load case with a fully fixed node set.
pub fn run_static_analysis(
    mesh: &Mesh,
    material: &MaterialCard,
    load_case: &LoadCase,
    opts: &AnalysisOptions,
) -> Result<FemSolution, FemError> {
    load_case.validate(mesh)?;
    let load =
        distribute_face_load(mesh, &load_case.loaded_face_set, load_case.total_force, load_case.direction)?;
    let constraints = DofConstraints::fix_node_set(mesh, &load_case.fixed_node_set)?;
    solve_with_constraints(mesh, material, load, &constraints, opts)
}

/// Shared analysis path for an explicit load vector and DOF constraints;
/// patch tests use this directly with statically determinate pins.
pub fn solve_with_constraints(
    mesh: &Mesh,
    material: &MaterialCard,
    load: Vec<f64>,
    constraints: &DofConstraints,
    opts: &AnalysisOptions,
) -> Result<FemSolution, FemError> {
    mesh.validate()?;
    let matrix = assemble(mesh, material)?;
    let applied_load = component_sums(&load);
    let system = apply_dirichlet(matrix, load, constraints)?;
    let solution = solve_pcg(&system.matrix, &system.rhs, &opts.solve)?;

    let stress = recover_stress(mesh, material, &solution.x)?;

    let raw_reactions = system.reactions(&solution.x);
    let mut per_node: std::collections::BTreeMap<usize, [f64; 3]> = std::collections::BTreeMap::new();
    let mut reaction_sum = [0.0; 3];
    for r in raw_reactions {
        let node = r.dof / 3;
        let component = r.dof % 3;
        per_node.entry(node).or_insert([0.0; 3])[component] = r.force;
        reaction_sum[component] += r.force;
    }

    let applied_norm = norm3(&applied_load);
    let residual3 = [
        reaction_sum[0] + applied_load[0],
        reaction_sum[1] + applied_load[1],
        reaction_sum[2] + applied_load[2],
    ];
    let equilibrium_residual_rel =
        if applied_norm > 0.0 { norm3(&residual3) / applied_norm } else { norm3(&residual3) };

    let mut displacements = Vec::with_capacity(mesh.n_nodes());
    let mut max_mag = 0.0_f64;
    for node in 0..mesh.n_nodes() {
        let u = [solution.x[3 * node], solution.x[3 * node + 1], solution.x[3 * node + 2]];
        max_mag = max_mag.max(norm3(&u));
        displacements.push(u);
    }

    Ok(FemSolution {
        displacements,
        max_von_mises: stress.max_von_mises_integration,
        max_von_mises_nodal: stress.max_von_mises_nodal,
        reactions: per_node.into_iter().collect(),
        max_displacement_magnitude: max_mag,
        reaction_sum,
        applied_load,
        equilibrium_residual_rel,
        solver_iterations: solution.iterations,
        solver_residual: solution.relative_residual,
        mesh_stats: mesh_stats(mesh),
        stress,
    })
}

fn component_sums(load: &[f64]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, v) in load.iter().enumerate() {
        out[i % 3] += v;
    }
    out
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Mean axial (z) displacement over a node set; the tip-displacement readout
/// for column cases.
pub fn mean_axial_displacement(mesh: &Mesh, solution: &FemSolution, node_set: &str) -> Result<f64, FemError> {
    let set = mesh.node_set(node_set)?;
    Ok(set.iter().map(|&n| solution.displacements[n][2]).sum::<f64>() / set.len() as f64)
}

/// CSV of nodal results: coordinates, displacements, Von Mises.
pub fn displacements_csv_string(mesh: &Mesh, solution: &FemSolution) -> String {
    let mut out = String::from("node,x_mm,y_mm,z_mm,ux_mm,uy_mm,uz_mm,von_mises_mpa\n");
    for node in 0..mesh.n_nodes() {
        let p = mesh.nodes[node];
        let u = solution.displacements[node];
        let _ = writeln!(
            out,
            "{node},{},{},{},{},{},{},{}",
            p[0], p[1], p[2], u[0], u[1], u[2], solution.stress.nodal_von_mises[node]
        );
    }
    out
}

/// Summary document for the JSON output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisSummary {
    pub n_nodes: usize,
    pub n_elements: usize,
    pub avg_element_quality: f64,
    pub max_displacement_mm: f64,
    pub max_von_mises_mpa: f64,
    pub max_von_mises_nodal_mpa: f64,
    pub applied_load_n: [f64; 3],
    pub reaction_sum_n: [f64; 3],
    pub equilibrium_residual_rel: f64,
    pub solver_iterations: usize,
    pub solver_residual: f64,
}

pub fn summary(solution: &FemSolution) -> AnalysisSummary {
    AnalysisSummary {
        n_nodes: solution.mesh_stats.n_nodes,
        n_elements: solution.mesh_stats.n_elements,
        avg_element_quality: solution.mesh_stats.avg_quality,
        max_displacement_mm: solution.max_displacement_magnitude,
        max_von_mises_mpa: solution.max_von_mises,
        max_von_mises_nodal_mpa: solution.max_von_mises_nodal,
        applied_load_n: solution.applied_load,
        reaction_sum_n: solution.reaction_sum,
        equilibrium_residual_rel: solution.equilibrium_residual_rel,
        solver_iterations: solution.solver_iterations,
        solver_residual: solution.solver_residual,
    }
}

pub fn summary_json_string(solution: &FemSolution) -> String {
    serde_json::to_string_pretty(&summary(solution)).expect("summary serializes") + "\n"
}
