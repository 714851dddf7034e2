//! Quadratic tetrahedral shape functions in barycentric coordinates and the
//! 4-point Gauss rule.
//!
//! Corner functions are `N_i = λ_i(2λ_i − 1)`, mid-edge functions
//! `N = 4λ_iλ_j` for the edge `ij`, ordered as in [`crate::mesh::EDGES`].
//! Local gradients are taken with respect to the reference coordinates
//! (ξ, η, ζ) = (λ₁, λ₂, λ₃) with λ₀ = 1 − ξ − η − ζ.

/// Barycentric coordinates of the 4-point Gauss rule; weights are ¼ each
/// and the rule integrates quadratics exactly over the tetrahedron.
pub const GAUSS_TET4: [([f64; 4], f64); 4] = {
    const A: f64 = 0.585_410_196_624_968_5;
    const B: f64 = 0.138_196_601_125_010_5;
    [
        ([A, B, B, B], 0.25),
        ([B, A, B, B], 0.25),
        ([B, B, A, B], 0.25),
        ([B, B, B, A], 0.25),
    ]
};

/// Evaluates the ten shape functions at barycentric coordinates.
pub fn shape_functions(bary: [f64; 4]) -> [f64; 10] {
    let [l0, l1, l2, l3] = bary;
    [
        l0 * (2.0 * l0 - 1.0),
        l1 * (2.0 * l1 - 1.0),
        l2 * (2.0 * l2 - 1.0),
        l3 * (2.0 * l3 - 1.0),
        4.0 * l0 * l1,
        4.0 * l1 * l2,
        4.0 * l2 * l0,
        4.0 * l0 * l3,
        4.0 * l1 * l3,
        4.0 * l2 * l3,
    ]
}

/// Gradients of the ten shape functions with respect to the reference
/// coordinates (ξ, η, ζ).
pub fn shape_gradients_local(bary: [f64; 4]) -> [[f64; 3]; 10] {
    let [l0, l1, l2, l3] = bary;
    // dN/dλ for each barycentric coordinate, then chain rule with
    // dλ0/dξ_k = -1, dλ_k/dξ_k = 1.
    let d0 = 4.0 * l0 - 1.0;
    let d1 = 4.0 * l1 - 1.0;
    let d2 = 4.0 * l2 - 1.0;
    let d3 = 4.0 * l3 - 1.0;
    [
        [-d0, -d0, -d0],
        [d1, 0.0, 0.0],
        [0.0, d2, 0.0],
        [0.0, 0.0, d3],
        [4.0 * (l0 - l1), -4.0 * l1, -4.0 * l1],
        [4.0 * l2, 4.0 * l1, 0.0],
        [-4.0 * l2, 4.0 * (l0 - l2), -4.0 * l2],
        [-4.0 * l3, -4.0 * l3, 4.0 * (l0 - l3)],
        [4.0 * l3, 0.0, 4.0 * l1],
        [0.0, 4.0 * l3, 4.0 * l2],
    ]
}

/// Barycentric coordinates of the ten reference nodes (corners then
/// mid-edge nodes in edge order).
pub const NODE_BARY: [[f64; 4]; 10] = [
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.5, 0.5, 0.0, 0.0],
    [0.0, 0.5, 0.5, 0.0],
    [0.5, 0.0, 0.5, 0.0],
    [0.5, 0.0, 0.0, 0.5],
    [0.0, 0.5, 0.0, 0.5],
    [0.0, 0.0, 0.5, 0.5],
];
