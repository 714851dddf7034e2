//! Solver verification: the constant-stress patch test, linearity and
//! superposition, equilibrium audits, and the cross-check against the 1-D
//! variable-section displacement oracle.

use approx::assert_relative_eq;
use presslab_core::column::{axial_displacement, AreaProfile};
use presslab_core::model::{MaterialCard, ScaleFactor};
use presslab_fem::analysis::{
    mean_axial_displacement, run_static_analysis, solve_with_constraints, AnalysisOptions, LoadCase,
};
use presslab_fem::assembly::{distribute_face_load, DofConstraints};
use presslab_fem::mesh::Mesh;
use presslab_fem::meshgen::column_mesh;
use presslab_fem::msh::{parse_msh, write_msh};

fn axis_aligned_prism() -> Mesh {
    // 100 mm tall, 10 x 10 mm section; round-trip through the interchange
    // format so the parser sits in the verified path.
    let mesh = column_mesh(100.0, |_| 10.0, 2, 2, 10).unwrap();
    parse_msh(&write_msh(&mesh)).unwrap()
}

/// Statically determinate patch constraints: the base plane is held axially,
/// one corner pins both lateral directions, and a second corner on the same
/// y-line pins y. The constant-stress solution remains admissible.
fn patch_constraints(mesh: &Mesh) -> DofConstraints {
    let mut constraints = DofConstraints::new();
    let base = mesh.node_set("base").unwrap().to_vec();
    for &node in &base {
        constraints.fix_dof(node, 2);
    }
    let corner_a = *base
        .iter()
        .min_by(|&&a, &&b| {
            let pa = mesh.nodes[a];
            let pb = mesh.nodes[b];
            (pa[0], pa[1]).partial_cmp(&(pb[0], pb[1])).unwrap()
        })
        .unwrap();
    let corner_b = *base
        .iter()
        .filter(|&&n| mesh.nodes[n][1] == mesh.nodes[corner_a][1])
        .max_by(|&&a, &&b| mesh.nodes[a][0].partial_cmp(&mesh.nodes[b][0]).unwrap())
        .unwrap();
    constraints.fix_dof(corner_a, 0);
    constraints.fix_dof(corner_a, 1);
    constraints.fix_dof(corner_b, 1);
    constraints
}

#[test]
fn patch_test_reproduces_the_constant_stress_state() {
    let mesh = axis_aligned_prism();
    let material = MaterialCard::new("patch", 1000.0, 0.38).unwrap();
    let load = distribute_face_load(&mesh, "top", 1000.0, [0.0, 0.0, -1.0]).unwrap();
    let constraints = patch_constraints(&mesh);
    let solution =
        solve_with_constraints(&mesh, &material, load, &constraints, &AnalysisOptions::default()).unwrap();

    // Tip axial displacement F L / (E A) = 1.0 mm, compressive.
    let tip = mean_axial_displacement(&mesh, &solution, "top").unwrap();
    assert_relative_eq!(tip, -1.0, max_relative = 1e-6);
    for &node in mesh.node_set("top").unwrap() {
        assert_relative_eq!(solution.displacements[node][2], -1.0, max_relative = 1e-6);
    }

    // Uniform uniaxial stress of -10 MPa at every integration point.
    for stresses in &solution.stress.element_stresses {
        for s in stresses {
            assert_relative_eq!(s[2], -10.0, max_relative = 1e-6);
            assert!(s[0].abs() < 1e-5 && s[1].abs() < 1e-5);
            assert!(s[3].abs() < 1e-5 && s[4].abs() < 1e-5 && s[5].abs() < 1e-5);
        }
    }

    // Von Mises = 10 MPa uniformly.
    assert_relative_eq!(solution.max_von_mises, 10.0, max_relative = 1e-6);
    for vm in &solution.stress.nodal_von_mises {
        assert_relative_eq!(*vm, 10.0, max_relative = 1e-6);
    }

    // Equilibrium: axial reactions balance the applied 1000 N.
    assert!(solution.equilibrium_residual_rel <= 1e-6);
    let axial: f64 = solution.reactions.iter().map(|(_, r)| r[2]).sum();
    assert_relative_eq!(axial, 1000.0, epsilon = 1e-3);
    let lateral: f64 = solution.reactions.iter().map(|(_, r)| r[0].abs() + r[1].abs()).sum();
    assert!(lateral < 1e-3, "lateral reactions {lateral}");
}

fn full_fixity_case(force: f64) -> LoadCase {
    LoadCase {
        total_force: force,
        direction: [0.0, 0.0, -1.0],
        loaded_face_set: "top".into(),
        fixed_node_set: "base".into(),
    }
}

#[test]
fn solution_is_linear_in_the_load() {
    let mesh = column_mesh(60.0, |_| 12.0, 2, 2, 6).unwrap();
    let material = MaterialCard::new("rPET", 1781.2, 0.38).unwrap();
    let opts = AnalysisOptions::default();
    let base = run_static_analysis(&mesh, &material, &full_fixity_case(1000.0), &opts).unwrap();
    let doubled = run_static_analysis(&mesh, &material, &full_fixity_case(2000.0), &opts).unwrap();
    let scale = base.max_displacement_magnitude;
    for (u1, u2) in base.displacements.iter().zip(&doubled.displacements) {
        for k in 0..3 {
            assert!(
                (u2[k] - 2.0 * u1[k]).abs() <= 1e-8 * scale,
                "{} vs {}",
                u2[k],
                2.0 * u1[k]
            );
        }
    }
    assert!(base.equilibrium_residual_rel <= 1e-6);
    assert!(doubled.equilibrium_residual_rel <= 1e-6);
}

#[test]
fn superposition_of_load_vectors_matches_summed_solution() {
    let mesh = column_mesh(40.0, |_| 10.0, 2, 2, 4).unwrap();
    let material = MaterialCard::new("rPET", 1630.0, 0.38).unwrap();
    let opts = AnalysisOptions::default();
    let constraints = DofConstraints::fix_node_set(&mesh, "base").unwrap();

    let axial = distribute_face_load(&mesh, "top", 500.0, [0.0, 0.0, -1.0]).unwrap();
    let shear = distribute_face_load(&mesh, "top", 200.0, [1.0, 0.0, 0.0]).unwrap();
    let combined: Vec<f64> = axial.iter().zip(&shear).map(|(a, b)| a + b).collect();

    let sol_a = solve_with_constraints(&mesh, &material, axial, &constraints, &opts).unwrap();
    let sol_b = solve_with_constraints(&mesh, &material, shear, &constraints, &opts).unwrap();
    let sol_ab = solve_with_constraints(&mesh, &material, combined, &constraints, &opts).unwrap();

    let scale = sol_ab.max_displacement_magnitude;
    for node in 0..mesh.n_nodes() {
        for k in 0..3 {
            let summed = sol_a.displacements[node][k] + sol_b.displacements[node][k];
            assert!(
                (sol_ab.displacements[node][k] - summed).abs() <= 1e-8 * scale,
                "node {node} dof {k}"
            );
        }
    }
}

#[test]
fn doubling_the_modulus_halves_displacements() {
    let mesh = column_mesh(60.0, |_| 12.0, 2, 2, 6).unwrap();
    let opts = AnalysisOptions::default();
    let soft = MaterialCard::new("soft", 1000.0, 0.38).unwrap();
    let stiff = MaterialCard::new("stiff", 2000.0, 0.38).unwrap();
    let case = full_fixity_case(1000.0);
    let sol_soft = run_static_analysis(&mesh, &soft, &case, &opts).unwrap();
    let sol_stiff = run_static_analysis(&mesh, &stiff, &case, &opts).unwrap();
    let scale = sol_soft.max_displacement_magnitude;
    for (u1, u2) in sol_soft.displacements.iter().zip(&sol_stiff.displacements) {
        for k in 0..3 {
            assert!((u2[k] - 0.5 * u1[k]).abs() <= 1e-8 * scale);
        }
    }
}

#[test]
fn tapered_column_matches_the_1d_oracle_within_two_percent() {
    // Slenderness 200/20 = 10; nu = 0 isolates the axial comparison.
    let profile = AreaProfile::from_anchors(
        vec![(0.0, 400.0), (100.0, 225.0), (200.0, 400.0)],
        ScaleFactor::FULL,
    )
    .unwrap();
    let force = 1000.0;
    let youngs = 1500.0;
    let oracle = axial_displacement(&profile, force, youngs, 1024).unwrap();

    let mesh = column_mesh(200.0, |z| profile.area_at(z).unwrap().sqrt(), 2, 2, 60).unwrap();
    let material = MaterialCard::new("taper", youngs, 0.0).unwrap();
    let solution =
        run_static_analysis(&mesh, &material, &full_fixity_case(force), &AnalysisOptions::default())
            .unwrap();
    let tip = -mean_axial_displacement(&mesh, &solution, "top").unwrap();
    let gap = (tip - oracle).abs() / oracle;
    assert!(gap <= 0.02, "FEM {tip:.6} vs oracle {oracle:.6} ({:.2}%)", 100.0 * gap);
    assert!(solution.equilibrium_residual_rel <= 1e-6);
}

#[test]
fn fully_fixed_base_under_zero_load_stays_at_rest() {
    let mesh = column_mesh(30.0, |_| 10.0, 1, 1, 3).unwrap();
    let material = MaterialCard::new("rPET", 1630.0, 0.38).unwrap();
    let constraints = DofConstraints::fix_node_set(&mesh, "base").unwrap();
    let load = vec![0.0; mesh.n_dofs()];
    let solution =
        solve_with_constraints(&mesh, &material, load, &constraints, &AnalysisOptions::default()).unwrap();
    assert_eq!(solution.max_displacement_magnitude, 0.0);
    for (_, r) in &solution.reactions {
        assert_eq!(*r, [0.0; 3]);
    }
}
