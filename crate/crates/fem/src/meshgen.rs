//! Structured test meshes: an axis-aligned column of cells, each split into
//! six tetrahedra along consistent diagonals, with mid-edge nodes inserted
//! afterwards so every element is exactly straight-sided.
//!
//! The cross-section side length may vary with height, which produces the
//! tapered square columns used to match 1-D area profiles: a square section
//! of side `sqrt(A(z))` carries the same area function as the profile.

use std::collections::BTreeMap;

use crate::mesh::{corner_volume, Face6, Mesh, EDGES};
use crate::FemError;

/// Permutations of the coordinate axes; each one contributes one tetrahedron
/// of the six-tet cell split, all sharing the cell's main diagonal.
const AXIS_PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Builds a column mesh of `nx × ny × nz` cells over height `length` [mm].
///
/// `side_at(z)` gives the square cross-section side [mm] at height `z` [mm];
/// corner layers follow it exactly and the section varies linearly between
/// layers. Node sets `base` (z = 0) and `top` (z = length) and the face set
/// `top` are populated.
pub fn column_mesh(
    length: f64,
    side_at: impl Fn(f64) -> f64,
    nx: usize,
    ny: usize,
    nz: usize,
) -> Result<Mesh, FemError> {
    if !(length > 0.0) {
        return Err(FemError::Domain(format!("length must be positive, got {length}")));
    }
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(FemError::Domain("cell counts must be at least 1".into()));
    }

    // Corner lattice, mapped to physical coordinates layer by layer.
    let corner_id = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
    let mut nodes: Vec<[f64; 3]> = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        let z = length * k as f64 / nz as f64;
        let side = side_at(z);
        if !(side > 0.0) || !side.is_finite() {
            return Err(FemError::Domain(format!("side_at({z}) must be positive, got {side}")));
        }
        for j in 0..=ny {
            for i in 0..=nx {
                let x = (i as f64 / nx as f64 - 0.5) * side;
                let y = (j as f64 / ny as f64 - 0.5) * side;
                nodes.push([x, y, z]);
            }
        }
    }

    // Six-tet split per cell; orientation fixed to positive volume.
    let mut tet4: Vec<[usize; 4]> = Vec::with_capacity(6 * nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let base = [i, j, k];
                for perm in AXIS_PERMS {
                    let mut vertex = base;
                    let mut path = [corner_id(base[0], base[1], base[2]), 0, 0, 0];
                    for (step, &axis) in perm.iter().enumerate() {
                        vertex[axis] += 1;
                        path[step + 1] = corner_id(vertex[0], vertex[1], vertex[2]);
                    }
                    let corners = [nodes[path[0]], nodes[path[1]], nodes[path[2]], nodes[path[3]]];
                    if corner_volume(&corners) < 0.0 {
                        path.swap(1, 2);
                    }
                    tet4.push(path);
                }
            }
        }
    }

    // Promote to 10-node elements with shared mid-edge nodes.
    let mut mid_ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut elements: Vec<[usize; 10]> = Vec::with_capacity(tet4.len());
    for corners in &tet4 {
        let mut conn = [0usize; 10];
        conn[..4].copy_from_slice(corners);
        for (slot, &(a, b)) in EDGES.iter().enumerate() {
            let key = (corners[a].min(corners[b]), corners[a].max(corners[b]));
            let id = *mid_ids.entry(key).or_insert_with(|| {
                let pa = nodes[key.0];
                let pb = nodes[key.1];
                nodes.push([
                    (pa[0] + pb[0]) / 2.0,
                    (pa[1] + pb[1]) / 2.0,
                    (pa[2] + pb[2]) / 2.0,
                ]);
                nodes.len() - 1
            });
            conn[4 + slot] = id;
        }
        elements.push(conn);
    }

    // Top faces: element faces whose three corners sit on the top plane.
    const FACES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [1, 2, 3], [0, 2, 3]];
    let on_top = |node: usize| nodes[node][2] == length;
    let mut top_faces: Vec<Face6> = Vec::new();
    for conn in &elements {
        for face in FACES {
            let [a, b, c] = [conn[face[0]], conn[face[1]], conn[face[2]]];
            if on_top(a) && on_top(b) && on_top(c) {
                let mid = |x: usize, y: usize| -> usize {
                    mid_ids[&(x.min(y), x.max(y))]
                };
                top_faces.push([a, b, c, mid(a, b), mid(b, c), mid(c, a)]);
            }
        }
    }

    let base_nodes: Vec<usize> =
        (0..nodes.len()).filter(|&n| nodes[n][2] == 0.0).collect();
    let top_nodes: Vec<usize> = (0..nodes.len()).filter(|&n| on_top(n)).collect();

    let mut mesh = Mesh { nodes, elements, ..Default::default() };
    mesh.node_sets.insert("base".into(), base_nodes);
    mesh.node_sets.insert("top".into(), top_nodes);
    mesh.face_sets.insert("top".into(), top_faces);
    mesh.validate()?;
    Ok(mesh)
}

/// Closed-form node count of [`column_mesh`]: the six-tet split uses every
/// point of the once-refined lattice.
pub fn column_mesh_node_count(nx: usize, ny: usize, nz: usize) -> usize {
    (2 * nx + 1) * (2 * ny + 1) * (2 * nz + 1)
}
