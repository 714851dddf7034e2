//! Property tests for the element kernels: shape-function identities,
//! quality bounds, Von Mises invariance, and stiffness symmetry on random
//! well-shaped elements.

use proptest::prelude::*;

use presslab_core::model::MaterialCard;
use presslab_fem::element::element_stiffness;
use presslab_fem::mesh::{corner_volume, tet_quality};
use presslab_fem::recover::von_mises;
use presslab_fem::shape::{shape_functions, shape_gradients_local};

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    /// Shape functions sum to one and their local gradients sum to zero at
    /// any interior point.
    #[test]
    fn partition_of_unity(raw in proptest::array::uniform4(0.01..1.0f64)) {
        let total: f64 = raw.iter().sum();
        let bary = [raw[0] / total, raw[1] / total, raw[2] / total, raw[3] / total];
        let n_sum: f64 = shape_functions(bary).iter().sum();
        prop_assert!((n_sum - 1.0).abs() <= 1e-12);
        let grads = shape_gradients_local(bary);
        for k in 0..3 {
            let g: f64 = grads.iter().map(|row| row[k]).sum();
            prop_assert!(g.abs() <= 1e-12);
        }
    }

    /// Von Mises stress ignores any hydrostatic shift.
    #[test]
    fn von_mises_deviatoric_invariance(
        s in proptest::array::uniform6(-100.0..100.0f64),
        p in -200.0..200.0f64,
    ) {
        let shifted = [s[0] + p, s[1] + p, s[2] + p, s[3], s[4], s[5]];
        let (a, b) = (von_mises(&s), von_mises(&shifted));
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    /// Quality stays in [0, 1] for arbitrary corner placements.
    #[test]
    fn quality_is_normalized(
        coords in proptest::array::uniform4(proptest::array::uniform3(-10.0..10.0f64)),
    ) {
        let q = tet_quality(&coords);
        prop_assert!((0.0..=1.0).contains(&q), "quality {q}");
    }

    /// Element stiffness of a random well-shaped tetrahedron is symmetric
    /// and annihilates rigid translations.
    #[test]
    fn stiffness_symmetry_and_translation_null_space(
        jitter in proptest::array::uniform4(proptest::array::uniform3(-0.15..0.15f64)),
        scale in 0.5..20.0f64,
    ) {
        let base = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ];
        let corners: [[f64; 3]; 4] = std::array::from_fn(|i| {
            std::array::from_fn(|k| (base[i][k] + jitter[i][k]) * scale)
        });
        prop_assume!(corner_volume(&corners) > 1e-3 * scale.powi(3));
        let mut coords = [[0.0; 3]; 10];
        coords[..4].copy_from_slice(&corners);
        for (slot, (a, b)) in presslab_fem::mesh::EDGES.iter().enumerate() {
            for k in 0..3 {
                coords[4 + slot][k] = 0.5 * (corners[*a][k] + corners[*b][k]);
            }
        }
        let material = MaterialCard::new("m", 1630.0, 0.38).unwrap();
        let k = element_stiffness(&coords, &material).unwrap();
        let k_max = k.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        for i in 0..30 {
            for j in (i + 1)..30 {
                prop_assert!((k[(i, j)] - k[(j, i)]).abs() <= 1e-11 * k_max);
            }
        }
        for axis in 0..3 {
            let mut u = nalgebra::SVector::<f64, 30>::zeros();
            for node in 0..10 {
                u[3 * node + axis] = 1.0;
            }
            let f = k * u;
            prop_assert!(f.norm() <= 1e-9 * k_max);
        }
    }
}
