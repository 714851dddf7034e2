//! Element-level kernels: the isotropic elasticity matrix, the
//! strain-displacement matrix, and the 30×30 element stiffness.
//!
//! Elements are straight-sided, so the isoparametric map is affine and the
//! Jacobian is constant; the 4-point Gauss rule then integrates the
//! stiffness integrand (quadratic) exactly.

use nalgebra::{Matrix3, SMatrix};
use presslab_core::model::MaterialCard;

use crate::shape::{shape_gradients_local, GAUSS_TET4};
use crate::FemError;

pub type BMatrix = SMatrix<f64, 6, 30>;
pub type ElementMatrix = SMatrix<f64, 30, 30>;
pub type DMatrix = SMatrix<f64, 6, 6>;

/// Isotropic elasticity matrix in engineering-strain ordering
/// [ε_xx, ε_yy, ε_zz, γ_xy, γ_yz, γ_xz].
pub fn elasticity_matrix(youngs_modulus: f64, poisson_ratio: f64) -> DMatrix {
    let e = youngs_modulus;
    let nu = poisson_ratio;
    let factor = e / ((1.0 + nu) * (1.0 - 2.0 * nu));
    let c1 = factor * (1.0 - nu);
    let c2 = factor * nu;
    let g = e / (2.0 * (1.0 + nu));
    let mut d = DMatrix::zeros();
    for i in 0..3 {
        for j in 0..3 {
            d[(i, j)] = if i == j { c1 } else { c2 };
        }
        d[(i + 3, i + 3)] = g;
    }
    d
}

/// Constant Jacobian of a straight-sided element: columns are the corner
/// edge vectors from corner 0. `det J = 6V`.
pub fn corner_jacobian(corners: &[[f64; 3]; 4]) -> Matrix3<f64> {
    Matrix3::from_columns(&[
        (nalgebra::Vector3::new(corners[1][0], corners[1][1], corners[1][2])
            - nalgebra::Vector3::new(corners[0][0], corners[0][1], corners[0][2])),
        (nalgebra::Vector3::new(corners[2][0], corners[2][1], corners[2][2])
            - nalgebra::Vector3::new(corners[0][0], corners[0][1], corners[0][2])),
        (nalgebra::Vector3::new(corners[3][0], corners[3][1], corners[3][2])
            - nalgebra::Vector3::new(corners[0][0], corners[0][1], corners[0][2])),
    ])
}

/// Strain-displacement matrix at one barycentric point, given the inverse
/// Jacobian transpose.
pub fn b_matrix(inv_jac_t: &Matrix3<f64>, bary: [f64; 4]) -> BMatrix {
    let local = shape_gradients_local(bary);
    let mut b = BMatrix::zeros();
    for (i, grad) in local.iter().enumerate() {
        let g = inv_jac_t * nalgebra::Vector3::new(grad[0], grad[1], grad[2]);
        let (dx, dy, dz) = (g[0], g[1], g[2]);
        let col = 3 * i;
        b[(0, col)] = dx;
        b[(1, col + 1)] = dy;
        b[(2, col + 2)] = dz;
        b[(3, col)] = dy;
        b[(3, col + 1)] = dx;
        b[(4, col + 1)] = dz;
        b[(4, col + 2)] = dy;
        b[(5, col)] = dz;
        b[(5, col + 2)] = dx;
    }
    b
}

/// Element stiffness `K_e = Σ_g w_g Bᵀ(g) D B(g) V` over the 4-point rule.
pub fn element_stiffness(
    coords: &[[f64; 3]; 10],
    material: &MaterialCard,
) -> Result<ElementMatrix, FemError> {
    let corners = [coords[0], coords[1], coords[2], coords[3]];
    let jac = corner_jacobian(&corners);
    let det = jac.determinant();
    if !(det > 0.0) {
        return Err(FemError::Domain(format!(
            "degenerate element Jacobian (det = {det:.3e})"
        )));
    }
    let inv_jac_t = jac
        .try_inverse()
        .ok_or_else(|| FemError::Domain("singular element Jacobian".into()))?
        .transpose();
    let d = elasticity_matrix(material.youngs_modulus, material.poisson_ratio);
    let volume = det / 6.0;

    let mut k = ElementMatrix::zeros();
    for (bary, weight) in GAUSS_TET4 {
        let b = b_matrix(&inv_jac_t, bary);
        k += b.transpose() * d * b * (weight * volume);
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::reference_tet10;
    use approx::assert_relative_eq;

    fn material() -> MaterialCard {
        MaterialCard::new("rPET", 1781.2, 0.38).unwrap()
    }

    fn reference_coords() -> [[f64; 3]; 10] {
        reference_tet10().element_coords(0)
    }

    #[test]
    fn elasticity_matrix_spot_values() {
        let d = elasticity_matrix(900.0, 0.25);
        assert_relative_eq!(d[(0, 0)], 1080.0, max_relative = 1e-12);
        assert_relative_eq!(d[(0, 1)], 360.0, max_relative = 1e-12);
        assert_relative_eq!(d[(3, 3)], 360.0, max_relative = 1e-12);
        assert_eq!(d[(0, 3)], 0.0);
    }

    #[test]
    fn stiffness_is_symmetric() {
        let k = element_stiffness(&reference_coords(), &material()).unwrap();
        let max = k.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        for i in 0..30 {
            for j in 0..30 {
                assert!(
                    (k[(i, j)] - k[(j, i)]).abs() <= 1e-12 * max,
                    "K[{i},{j}] asymmetric"
                );
            }
        }
    }

    #[test]
    fn stiffness_has_exactly_six_rigid_body_modes() {
        let k = element_stiffness(&reference_coords(), &material()).unwrap();
        let norm = k.norm();
        let eigen = nalgebra::SymmetricEigen::new(k);
        let near_zero =
            eigen.eigenvalues.iter().filter(|&&lambda| lambda.abs() <= 1e-8 * norm).count();
        assert_eq!(near_zero, 6, "eigenvalues: {:?}", eigen.eigenvalues.as_slice());
        let negative = eigen.eigenvalues.iter().filter(|&&lambda| lambda < -1e-8 * norm).count();
        assert_eq!(negative, 0);
    }

    #[test]
    fn stiffness_scales_linearly_with_coordinates() {
        let coords = reference_coords();
        let scaled: [[f64; 3]; 10] =
            std::array::from_fn(|i| [2.0 * coords[i][0], 2.0 * coords[i][1], 2.0 * coords[i][2]]);
        let k1 = element_stiffness(&coords, &material()).unwrap();
        let k2 = element_stiffness(&scaled, &material()).unwrap();
        for i in 0..30 {
            for j in 0..30 {
                assert_relative_eq!(k2[(i, j)], 2.0 * k1[(i, j)], max_relative = 1e-12, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn stiffness_rejects_degenerate_geometry() {
        let mut coords = reference_coords();
        coords[3] = [0.5, 0.5, 0.0]; // corner dropped into the base plane
        assert!(element_stiffness(&coords, &material()).is_err());
    }

    #[test]
    fn rigid_translation_produces_no_force() {
        let k = element_stiffness(&reference_coords(), &material()).unwrap();
        let mut u = nalgebra::SVector::<f64, 30>::zeros();
        for i in 0..10 {
            u[3 * i] = 1.0;
        }
        let f = k * u;
        assert!(f.norm() <= 1e-10 * k.norm());
    }
}
