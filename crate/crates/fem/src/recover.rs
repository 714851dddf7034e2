//! Stress recovery: σ = D·B·u at the integration points, volume-weighted
//! nodal tensor averaging, and the Von Mises field.

use presslab_core::model::MaterialCard;

use crate::element::{b_matrix, corner_jacobian, elasticity_matrix};
use crate::mesh::Mesh;
use crate::shape::GAUSS_TET4;
use crate::FemError;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Symmetric stress tensor in engineering order
/// [σ_xx, σ_yy, σ_zz, τ_xy, τ_yz, τ_xz].
pub type StressVec = [f64; 6];

/// Von Mises equivalent stress from the deviatoric second invariant.
pub fn von_mises(s: &StressVec) -> f64 {
    let [sx, sy, sz, txy, tyz, txz] = *s;
    (0.5 * ((sx - sy).powi(2) + (sy - sz).powi(2) + (sz - sx).powi(2))
        + 3.0 * (txy * txy + tyz * tyz + txz * txz))
        .sqrt()
}

/// Recovered stress state of a solved analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct StressField {
    /// Per element, per integration point.
    pub element_stresses: Vec<[StressVec; 4]>,
    /// Volume-weighted nodal average of the adjacent elements' point values.
    pub nodal_stress: Vec<StressVec>,
    /// Von Mises of the averaged nodal tensor.
    pub nodal_von_mises: Vec<f64>,
    /// Maximum Von Mises over all integration points (conservative).
    pub max_von_mises_integration: f64,
    /// Maximum of the smoothed nodal field.
    pub max_von_mises_nodal: f64,
}

/// Computes integration-point stresses and the nodal Von Mises field from a
/// displacement vector (3 DOF per node, interleaved).
pub fn recover_stress(
    mesh: &Mesh,
    material: &MaterialCard,
    displacements: &[f64],
) -> Result<StressField, FemError> {
    assert_eq!(displacements.len(), mesh.n_dofs(), "displacement vector length");
    let d = elasticity_matrix(material.youngs_modulus, material.poisson_ratio);

    let per_element = |e: usize| -> Result<[StressVec; 4], FemError> {
        let coords = mesh.element_coords(e);
        let corners = [coords[0], coords[1], coords[2], coords[3]];
        let jac = corner_jacobian(&corners);
        let inv_jac_t = jac
            .try_inverse()
            .ok_or_else(|| FemError::InvalidMesh {
                entity: format!("element {e}"),
                message: "singular Jacobian during stress recovery".into(),
            })?
            .transpose();
        let mut u = nalgebra::SVector::<f64, 30>::zeros();
        for (i_local, &node) in mesh.elements[e].iter().enumerate() {
            for k in 0..3 {
                u[3 * i_local + k] = displacements[3 * node + k];
            }
        }
        let mut out = [[0.0; 6]; 4];
        for (g, (bary, _)) in GAUSS_TET4.iter().enumerate() {
            let b = b_matrix(&inv_jac_t, *bary);
            let sigma = d * (b * u);
            out[g] = [sigma[0], sigma[1], sigma[2], sigma[3], sigma[4], sigma[5]];
        }
        Ok(out)
    };

    let ids: Vec<usize> = (0..mesh.n_elements()).collect();
    #[cfg(feature = "parallel")]
    let element_stresses: Vec<[StressVec; 4]> =
        ids.par_iter().map(|&e| per_element(e)).collect::<Result<_, _>>()?;
    #[cfg(not(feature = "parallel"))]
    let element_stresses: Vec<[StressVec; 4]> =
        ids.iter().map(|&e| per_element(e)).collect::<Result<_, _>>()?;

    // Volume-weighted nodal averaging of element-mean point values.
    let mut acc = vec![[0.0_f64; 6]; mesh.n_nodes()];
    let mut weight = vec![0.0_f64; mesh.n_nodes()];
    let mut max_ip = 0.0_f64;
    for (e, stresses) in element_stresses.iter().enumerate() {
        let volume = mesh.element_volume(e);
        let mut mean = [0.0; 6];
        for point in stresses {
            max_ip = max_ip.max(von_mises(point));
            for k in 0..6 {
                mean[k] += point[k] / 4.0;
            }
        }
        for &node in &mesh.elements[e] {
            for k in 0..6 {
                acc[node][k] += volume * mean[k];
            }
            weight[node] += volume;
        }
    }
    let mut nodal_stress = vec![[0.0; 6]; mesh.n_nodes()];
    let mut nodal_von_mises = vec![0.0; mesh.n_nodes()];
    let mut max_nodal = 0.0_f64;
    for node in 0..mesh.n_nodes() {
        if weight[node] > 0.0 {
            for k in 0..6 {
                nodal_stress[node][k] = acc[node][k] / weight[node];
            }
        }
        let vm = von_mises(&nodal_stress[node]);
        nodal_von_mises[node] = vm;
        max_nodal = max_nodal.max(vm);
    }

    Ok(StressField {
        element_stresses,
        nodal_stress,
        nodal_von_mises,
        max_von_mises_integration: max_ip,
        max_von_mises_nodal: max_nodal,
    })
}
