//! Tetrahedral mesh model: 10-node elements (4 corners, 6 mid-edge nodes),
//! named node and face sets, validation, and quality statistics.
//!
//! Element node ordering: corners 0–3 followed by the mid-edge nodes on the
//! edges 01, 12, 20, 03, 13, 23. Elements are straight-sided: every mid-edge
//! node must sit at its edge midpoint (within 1e-6 of the edge length), which
//! keeps the isoparametric map affine and the element Jacobian constant.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::FemError;

/// Mid-edge node slots 4..9 correspond to these corner pairs.
pub const EDGES: [(usize, usize); 6] = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)];

/// Relative tolerance (of the edge length) for mid-edge node placement.
pub const MID_EDGE_TOL: f64 = 1e-6;

/// A 6-node triangular face: corners 0–2, then mid-edge nodes on edges
/// 01, 12, 20.
pub type Face6 = [usize; 6];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mesh {
    /// Node coordinates [mm].
    pub nodes: Vec<[f64; 3]>,
    /// 10-node connectivity per element.
    pub elements: Vec<[usize; 10]>,
    /// Named node sets (sorted, unique).
    pub node_sets: BTreeMap<String, Vec<usize>>,
    /// Named 6-node triangular face lists.
    pub face_sets: BTreeMap<String, Vec<Face6>>,
}

impl Mesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn n_dofs(&self) -> usize {
        3 * self.nodes.len()
    }

    /// Corner coordinates of one element.
    pub fn corners(&self, element: usize) -> [[f64; 3]; 4] {
        let conn = &self.elements[element];
        [
            self.nodes[conn[0]],
            self.nodes[conn[1]],
            self.nodes[conn[2]],
            self.nodes[conn[3]],
        ]
    }

    /// All ten node coordinates of one element.
    pub fn element_coords(&self, element: usize) -> [[f64; 3]; 10] {
        let conn = &self.elements[element];
        std::array::from_fn(|i| self.nodes[conn[i]])
    }

    /// Signed corner-tetrahedron volume of one element.
    pub fn element_volume(&self, element: usize) -> f64 {
        corner_volume(&self.corners(element))
    }

    pub fn node_set(&self, name: &str) -> Result<&[usize], FemError> {
        match self.node_sets.get(name) {
            Some(set) if !set.is_empty() => Ok(set),
            _ => Err(FemError::MissingSet { kind: "node", name: name.to_string() }),
        }
    }

    pub fn face_set(&self, name: &str) -> Result<&[Face6], FemError> {
        match self.face_sets.get(name) {
            Some(set) if !set.is_empty() => Ok(set),
            _ => Err(FemError::MissingSet { kind: "face", name: name.to_string() }),
        }
    }

    /// Full validation: index ranges, positive corner volumes, mid-edge nodes
    /// at edge midpoints, and set indices in range.
    pub fn validate(&self) -> Result<(), FemError> {
        let n = self.nodes.len();
        for (id, node) in self.nodes.iter().enumerate() {
            if node.iter().any(|c| !c.is_finite()) {
                return Err(FemError::InvalidMesh {
                    entity: format!("node {id}"),
                    message: "non-finite coordinate".into(),
                });
            }
        }
        for (id, conn) in self.elements.iter().enumerate() {
            for &node in conn {
                if node >= n {
                    return Err(FemError::InvalidMesh {
                        entity: format!("element {id}"),
                        message: format!("node index {node} out of range ({n} nodes)"),
                    });
                }
            }
            let volume = self.element_volume(id);
            if !(volume > 0.0) {
                return Err(FemError::InvalidMesh {
                    entity: format!("element {id}"),
                    message: format!("non-positive corner volume {volume:.6e} (inverted element)"),
                });
            }
            for (slot, &(a, b)) in EDGES.iter().enumerate() {
                let pa = self.nodes[conn[a]];
                let pb = self.nodes[conn[b]];
                let mid = self.nodes[conn[4 + slot]];
                let edge_len = dist(&pa, &pb);
                let midpoint = [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0, (pa[2] + pb[2]) / 2.0];
                if dist(&mid, &midpoint) > MID_EDGE_TOL * edge_len {
                    return Err(FemError::InvalidMesh {
                        entity: format!("element {id}"),
                        message: format!(
                            "mid-edge node {} is off the midpoint of edge {a}-{b} by {:.3e} (edge length {:.3e})",
                            conn[4 + slot],
                            dist(&mid, &midpoint),
                            edge_len
                        ),
                    });
                }
            }
        }
        for (name, set) in &self.node_sets {
            for &node in set {
                if node >= n {
                    return Err(FemError::InvalidMesh {
                        entity: format!("node set `{name}`"),
                        message: format!("node index {node} out of range"),
                    });
                }
            }
        }
        for (name, faces) in &self.face_sets {
            for face in faces {
                for &node in face {
                    if node >= n {
                        return Err(FemError::InvalidMesh {
                            entity: format!("face set `{name}`"),
                            message: format!("node index {node} out of range"),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Signed volume of the corner tetrahedron.
pub fn corner_volume(corners: &[[f64; 3]; 4]) -> f64 {
    let u = sub(&corners[1], &corners[0]);
    let v = sub(&corners[2], &corners[0]);
    let w = sub(&corners[3], &corners[0]);
    (u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
        + u[2] * (v[0] * w[1] - v[1] * w[0]))
        / 6.0
}

/// Shape quality of a tetrahedron from its corner coordinates:
/// `Q = 6·sqrt(2)·V / l_rms³` with `l_rms` the root-mean-square of the six
/// corner edge lengths. Q = 1 for the regular tetrahedron; Q → 0 as the
/// element degenerates. Negative volumes clamp to 0.
pub fn tet_quality(corners: &[[f64; 3]; 4]) -> f64 {
    let volume = corner_volume(corners);
    if !(volume > 0.0) {
        return 0.0;
    }
    let mut sum_sq = 0.0;
    for (a, b) in [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)] {
        let d = sub(&corners[b], &corners[a]);
        sum_sq += d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    }
    let l_rms = (sum_sq / 6.0).sqrt();
    (6.0 * std::f64::consts::SQRT_2 * volume / (l_rms * l_rms * l_rms)).min(1.0)
}

/// Mesh size and quality statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshStats {
    pub n_elements: usize,
    pub n_nodes: usize,
    /// Mean element quality in [0, 1].
    pub avg_quality: f64,
}

/// Computes mesh statistics; the quality average runs over corner
/// tetrahedra.
pub fn mesh_stats(mesh: &Mesh) -> MeshStats {
    let total: f64 = (0..mesh.n_elements()).map(|e| tet_quality(&mesh.corners(e))).sum();
    MeshStats {
        n_elements: mesh.n_elements(),
        n_nodes: mesh.n_nodes(),
        avg_quality: if mesh.n_elements() > 0 { total / mesh.n_elements() as f64 } else { 0.0 },
    }
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = sub(a, b);
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// A reference 10-node tetrahedron with unit legs along the axes.
pub fn reference_tet10() -> Mesh {
    let nodes = vec![
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.5, 0.0, 0.0],
        [0.5, 0.5, 0.0],
        [0.0, 0.5, 0.0],
        [0.0, 0.0, 0.5],
        [0.5, 0.0, 0.5],
        [0.0, 0.5, 0.5],
    ];
    Mesh {
        nodes,
        elements: vec![[0, 1, 2, 3, 4, 5, 6, 7, 8, 9]],
        node_sets: BTreeMap::new(),
        face_sets: BTreeMap::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn regular_tet() -> [[f64; 3]; 4] {
        // Alternating cube corners give a regular tetrahedron.
        [
            [0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 1.0],
            [1.0, 0.0, 1.0],
        ]
    }

    #[test]
    fn quality_of_regular_tet_is_one() {
        assert_relative_eq!(tet_quality(&regular_tet()), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn quality_of_degenerate_tet_is_zero() {
        let flat = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.5, 0.5, 0.0],
        ];
        assert_eq!(tet_quality(&flat), 0.0);
    }

    #[test]
    fn quality_of_right_corner_tet_matches_closed_form() {
        let corners = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ];
        // Edges 1,1,1,sqrt2,sqrt2,sqrt2; V = 1/6; Q = sqrt(2)/1.5^1.5.
        let expected = std::f64::consts::SQRT_2 / 1.5_f64.powf(1.5);
        assert_relative_eq!(tet_quality(&corners), expected, max_relative = 1e-12);
        assert_relative_eq!(tet_quality(&corners), 0.7698, max_relative = 1e-4);
    }

    #[test]
    fn reference_mesh_validates() {
        let mesh = reference_tet10();
        mesh.validate().unwrap();
        let stats = mesh_stats(&mesh);
        assert_eq!(stats.n_nodes, 10);
        assert_eq!(stats.n_elements, 1);
        assert!(stats.avg_quality > 0.0 && stats.avg_quality <= 1.0);
    }

    #[test]
    fn validation_rejects_inverted_elements() {
        let mut mesh = reference_tet10();
        mesh.elements[0].swap(1, 2);
        // Mid-edge nodes no longer match after the corner swap either, but
        // the volume check fires first.
        let err = mesh.validate().unwrap_err();
        assert!(matches!(err, FemError::InvalidMesh { .. }), "{err}");
        assert!(err.to_string().contains("non-positive"));
    }

    #[test]
    fn validation_rejects_off_midpoint_mid_nodes() {
        let mut mesh = reference_tet10();
        mesh.nodes[4] = [0.5, 0.1, 0.0];
        let err = mesh.validate().unwrap_err();
        assert!(err.to_string().contains("mid-edge"), "{err}");
    }

    #[test]
    fn validation_rejects_out_of_range_indices() {
        let mut mesh = reference_tet10();
        mesh.elements[0][9] = 99;
        assert!(mesh.validate().is_err());
    }
}
