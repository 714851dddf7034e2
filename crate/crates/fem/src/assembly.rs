//! Global assembly, consistent face loads, Dirichlet constraints by
//! row/column elimination (with retained rows for reaction recovery), and
//! the reaction audit.

use std::collections::BTreeSet;

use presslab_core::model::MaterialCard;

use crate::element::{element_stiffness, ElementMatrix};
use crate::mesh::{Face6, Mesh};
use crate::sparse::CsrMatrix;
use crate::FemError;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Elements per parallel batch during assembly; batches are scattered
/// sequentially in element order, so assembly is deterministic.
const ASSEMBLY_CHUNK: usize = 256;

/// Builds the DOF-level sparsity pattern from element connectivity: row `i`
/// lists the sorted column indices coupled to DOF `i`.
pub fn sparsity_pattern(mesh: &Mesh) -> Vec<Vec<usize>> {
    let n_nodes = mesh.n_nodes();
    let mut node_neighbors: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n_nodes];
    for conn in &mesh.elements {
        for &a in conn {
            for &b in conn {
                node_neighbors[a].insert(b as u32);
            }
        }
    }
    // Isolated nodes still need their diagonal.
    for (node, neighbors) in node_neighbors.iter_mut().enumerate() {
        neighbors.insert(node as u32);
    }
    let mut pattern = Vec::with_capacity(3 * n_nodes);
    for neighbors in &node_neighbors {
        for _dof in 0..3 {
            let mut row = Vec::with_capacity(3 * neighbors.len());
            for &other in neighbors {
                let base = 3 * other as usize;
                row.extend_from_slice(&[base, base + 1, base + 2]);
            }
            pattern.push(row);
        }
    }
    pattern
}

/// Assembles the global stiffness matrix (3·n_nodes square, symmetric).
/// Element matrices are computed batch-parallel and scattered in fixed
/// element order.
pub fn assemble(mesh: &Mesh, material: &MaterialCard) -> Result<CsrMatrix, FemError> {
    material.validate()?;
    let mut matrix = CsrMatrix::from_pattern(&sparsity_pattern(mesh));
    let element_ids: Vec<usize> = (0..mesh.n_elements()).collect();

    for chunk in element_ids.chunks(ASSEMBLY_CHUNK) {
        let compute = |&e: &usize| -> Result<(usize, ElementMatrix), FemError> {
            let coords = mesh.element_coords(e);
            element_stiffness(&coords, material).map(|k| (e, k)).map_err(|err| {
                FemError::InvalidMesh { entity: format!("element {e}"), message: err.to_string() }
            })
        };
        #[cfg(feature = "parallel")]
        let batch: Vec<Result<(usize, ElementMatrix), FemError>> = chunk.par_iter().map(compute).collect();
        #[cfg(not(feature = "parallel"))]
        let batch: Vec<Result<(usize, ElementMatrix), FemError>> = chunk.iter().map(compute).collect();

        for item in batch {
            let (e, k) = item?;
            let conn = &mesh.elements[e];
            for (i_local, &i_node) in conn.iter().enumerate() {
                for (j_local, &j_node) in conn.iter().enumerate() {
                    for di in 0..3 {
                        for dj in 0..3 {
                            matrix.add(
                                3 * i_node + di,
                                3 * j_node + dj,
                                k[(3 * i_local + di, 3 * j_local + dj)],
                            );
                        }
                    }
                }
            }
        }
    }
    Ok(matrix)
}

/// Area of a straight-sided 6-node triangular face (from its corners).
pub fn face_area(mesh: &Mesh, face: &Face6) -> f64 {
    let a = mesh.nodes[face[0]];
    let b = mesh.nodes[face[1]];
    let c = mesh.nodes[face[2]];
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let cross = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    0.5 * (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt()
}

/// Distributes a uniform traction over a face set as consistent nodal loads.
///
/// Exact integration of the quadratic shape functions over a straight
/// triangle puts the whole face load on the mid-edge nodes (one third of the
/// face force each) and nothing on the corners, so the nodal sum equals
/// `total_force · direction` exactly.
pub fn distribute_face_load(
    mesh: &Mesh,
    face_set: &str,
    total_force: f64,
    direction: [f64; 3],
) -> Result<Vec<f64>, FemError> {
    let faces = mesh.face_set(face_set)?;
    let total_area: f64 = faces.iter().map(|f| face_area(mesh, f)).sum();
    if !(total_area > 0.0) {
        return Err(FemError::Domain(format!("face set `{face_set}` has zero total area")));
    }
    let traction = total_force / total_area;
    let mut load = vec![0.0; mesh.n_dofs()];
    for face in faces {
        let share = traction * face_area(mesh, face) / 3.0;
        for &mid in &face[3..6] {
            for k in 0..3 {
                load[3 * mid + k] += share * direction[k];
            }
        }
    }
    Ok(load)
}

/// A set of zero-valued single-DOF constraints.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DofConstraints {
    fixed: BTreeSet<usize>,
}

impl DofConstraints {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fixes all three displacement components of every node in the set.
    pub fn fix_node_set(mesh: &Mesh, name: &str) -> Result<Self, FemError> {
        let mut constraints = Self::new();
        for &node in mesh.node_set(name)? {
            constraints.fix_node(node);
        }
        Ok(constraints)
    }

    pub fn fix_node(&mut self, node: usize) -> &mut Self {
        for k in 0..3 {
            self.fixed.insert(3 * node + k);
        }
        self
    }

    /// Fixes one displacement component (0 = x, 1 = y, 2 = z).
    pub fn fix_dof(&mut self, node: usize, component: usize) -> &mut Self {
        assert!(component < 3);
        self.fixed.insert(3 * node + component);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.fixed.is_empty()
    }

    pub fn dofs(&self) -> impl Iterator<Item = usize> + '_ {
        self.fixed.iter().copied()
    }

    pub fn contains(&self, dof: usize) -> bool {
        self.fixed.contains(&dof)
    }
}

/// The constrained linear system plus everything needed to recover
/// reactions afterwards.
#[derive(Debug, Clone)]
pub struct ConstrainedSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Original (pre-elimination) rows of the constrained DOFs.
    retained_rows: Vec<(usize, Vec<(usize, f64)>)>,
    /// Original load at the constrained DOFs.
    retained_loads: Vec<f64>,
}

/// Applies zero Dirichlet constraints by row/column elimination. The
/// eliminated diagonal takes the mean diagonal magnitude of the original
/// matrix, which keeps the conditioning neutral; the original rows are
/// retained for reaction recovery.
pub fn apply_dirichlet(
    matrix: CsrMatrix,
    load: Vec<f64>,
    constraints: &DofConstraints,
) -> Result<ConstrainedSystem, FemError> {
    if constraints.is_empty() {
        return Err(FemError::NoBoundaryConditions);
    }
    let n = matrix.n();
    let diag_mean = {
        let diag = matrix.diagonal();
        diag.iter().map(|d| d.abs()).sum::<f64>() / n as f64
    };

    let mut retained_rows = Vec::new();
    let mut retained_loads = Vec::new();
    let mut constrained = matrix;
    let mut rhs = load;
    for dof in constraints.dofs() {
        assert!(dof < n, "constrained dof {dof} out of range");
        let (cols, vals) = constrained.row(dof);
        retained_rows.push((dof, cols.iter().copied().zip(vals.iter().copied()).collect()));
        retained_loads.push(rhs[dof]);
    }
    for dof in constraints.dofs() {
        constrained.eliminate_row_col(dof);
        constrained.set_diagonal(dof, diag_mean);
        rhs[dof] = 0.0;
    }
    Ok(ConstrainedSystem { matrix: constrained, rhs, retained_rows, retained_loads })
}

/// Reaction force at one constrained DOF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reaction {
    pub dof: usize,
    pub force: f64,
}

impl ConstrainedSystem {
    /// Reactions `R = K_original·u − f_original` at the constrained DOFs.
    pub fn reactions(&self, displacements: &[f64]) -> Vec<Reaction> {
        self.retained_rows
            .iter()
            .zip(&self.retained_loads)
            .map(|((dof, row), &f)| {
                let force: f64 = row.iter().map(|&(col, val)| val * displacements[col]).sum::<f64>() - f;
                Reaction { dof: *dof, force }
            })
            .collect()
    }
}
