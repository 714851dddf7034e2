//! Compressed-sparse-row matrices and a Jacobi-preconditioned conjugate
//! gradient solver.
//!
//! The matvec parallelizes over rows (each output entry is an independent
//! ordered dot product) and every reduction is a sequential ordered sum, so
//! results are bitwise run-to-run deterministic for fixed inputs regardless
//! of worker count.

use crate::FemError;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Square CSR matrix with the full (symmetric) pattern stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds an all-zero matrix with the given sparsity pattern.
    /// `neighbors[i]` must list the column indices of row `i` sorted and
    /// unique.
    pub fn from_pattern(neighbors: &[Vec<usize>]) -> Self {
        let n = neighbors.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        for row in neighbors {
            debug_assert!(row.windows(2).all(|w| w[0] < w[1]), "columns must be sorted unique");
            cols.extend_from_slice(row);
            row_ptr.push(cols.len());
        }
        let vals = vec![0.0; cols.len()];
        Self { n, row_ptr, cols, vals }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Adds `value` at `(row, col)`; the slot must exist in the pattern.
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        let start = self.row_ptr[row];
        let end = self.row_ptr[row + 1];
        let slot = self.cols[start..end]
            .binary_search(&col)
            .unwrap_or_else(|_| panic!("pattern slot ({row}, {col}) missing"));
        self.vals[start + slot] += value;
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let start = self.row_ptr[row];
        let end = self.row_ptr[row + 1];
        match self.cols[start..end].binary_search(&col) {
            Ok(slot) => self.vals[start + slot],
            Err(_) => 0.0,
        }
    }

    /// Row view as parallel (columns, values) slices.
    pub fn row(&self, row: usize) -> (&[usize], &[f64]) {
        let start = self.row_ptr[row];
        let end = self.row_ptr[row + 1];
        (&self.cols[start..end], &self.vals[start..end])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        let row_product = |i: usize| -> f64 {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&col, &val) in cols.iter().zip(vals) {
                acc += val * x[col];
            }
            acc
        };
        #[cfg(feature = "parallel")]
        {
            y.par_iter_mut().enumerate().for_each(|(i, out)| *out = row_product(i));
        }
        #[cfg(not(feature = "parallel"))]
        {
            for (i, out) in y.iter_mut().enumerate() {
                *out = row_product(i);
            }
        }
    }

    /// Zeroes row and column `dof`, leaving the diagonal slot untouched.
    pub fn eliminate_row_col(&mut self, dof: usize) {
        let start = self.row_ptr[dof];
        let end = self.row_ptr[dof + 1];
        // Zero the row, remembering which columns it touched.
        let touched: Vec<usize> = self.cols[start..end].to_vec();
        for v in &mut self.vals[start..end] {
            *v = 0.0;
        }
        // Symmetric pattern: the column entries live exactly in those rows.
        for row in touched {
            if row == dof {
                continue;
            }
            let s = self.row_ptr[row];
            let e = self.row_ptr[row + 1];
            if let Ok(slot) = self.cols[s..e].binary_search(&dof) {
                self.vals[s + slot] = 0.0;
            }
        }
    }

    /// Sets the diagonal entry.
    pub fn set_diagonal(&mut self, dof: usize, value: f64) {
        let start = self.row_ptr[dof];
        let end = self.row_ptr[dof + 1];
        let slot = self.cols[start..end]
            .binary_search(&dof)
            .unwrap_or_else(|_| panic!("diagonal slot {dof} missing"));
        self.vals[start + slot] = value;
    }

    /// Maximum relative asymmetry |A - Aᵀ| / max|A|.
    pub fn asymmetry(&self) -> f64 {
        let mut max_val = 0.0_f64;
        let mut max_diff = 0.0_f64;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                max_val = max_val.max(v.abs());
                max_diff = max_diff.max((v - self.get(j, i)).abs());
            }
        }
        if max_val > 0.0 {
            max_diff / max_val
        } else {
            0.0
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solver configuration. The defaults implement the 1e-10
/// relative-residual contract.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub rel_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { rel_tolerance: 1e-10, max_iterations: 20_000 }
    }
}

/// Converged solve outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct PcgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Achieved ‖Ax − b‖/‖b‖ (recomputed, not the recurrence residual).
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for symmetric positive definite
/// systems. Detects indefiniteness through the p·Ap curvature and reports
/// the achieved residual on non-convergence.
pub fn solve_pcg(matrix: &CsrMatrix, rhs: &[f64], opts: &SolveOptions) -> Result<PcgSolution, FemError> {
    let n = matrix.n();
    assert_eq!(rhs.len(), n);
    let b_norm = norm(rhs);
    if b_norm == 0.0 {
        return Ok(PcgSolution { x: vec![0.0; n], iterations: 0, relative_residual: 0.0 });
    }

    let mut precond = matrix.diagonal();
    for (i, d) in precond.iter_mut().enumerate() {
        if !(*d > 0.0) {
            return Err(FemError::NotSpd { iteration: i });
        }
        *d = 1.0 / *d;
    }

    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&precond).map(|(ri, mi)| ri * mi).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];

    for iteration in 1..=opts.max_iterations {
        matrix.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(FemError::NotSpd { iteration });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm(&r) <= opts.rel_tolerance * b_norm {
            // Confirm with a fresh residual; the recurrence can drift.
            matrix.matvec(&x, &mut ap);
            let mut true_norm = 0.0;
            for i in 0..n {
                let d = ap[i] - rhs[i];
                true_norm += d * d;
            }
            let relative_residual = true_norm.sqrt() / b_norm;
            if relative_residual <= opts.rel_tolerance * 10.0 {
                return Ok(PcgSolution { x, iterations: iteration, relative_residual });
            }
        }
        for i in 0..n {
            z[i] = r[i] * precond[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(FemError::NonConvergence {
        target: opts.rel_tolerance,
        achieved: norm(&r) / b_norm,
        iterations: opts.max_iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dense_2x2(a: f64, b: f64, c: f64, d: f64) -> CsrMatrix {
        let mut m = CsrMatrix::from_pattern(&[vec![0, 1], vec![0, 1]]);
        m.add(0, 0, a);
        m.add(0, 1, b);
        m.add(1, 0, c);
        m.add(1, 1, d);
        m
    }

    #[test]
    fn pcg_solves_hand_inverted_2x2() {
        // [4 1; 1 3] x = [1, 2] -> x = (1/11, 7/11).
        let m = dense_2x2(4.0, 1.0, 1.0, 3.0);
        let sol = solve_pcg(&m, &[1.0, 2.0], &SolveOptions::default()).unwrap();
        assert_relative_eq!(sol.x[0], 1.0 / 11.0, max_relative = 1e-12);
        assert_relative_eq!(sol.x[1], 7.0 / 11.0, max_relative = 1e-12);
        assert!(sol.relative_residual <= 1e-9);
    }

    #[test]
    fn pcg_zero_rhs_is_zero() {
        let m = dense_2x2(4.0, 1.0, 1.0, 3.0);
        let sol = solve_pcg(&m, &[0.0, 0.0], &SolveOptions::default()).unwrap();
        assert_eq!(sol.x, vec![0.0, 0.0]);
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn pcg_detects_indefinite_systems() {
        let m = dense_2x2(1.0, 2.0, 2.0, 1.0); // eigenvalues 3, -1
        // The rhs must excite the negative-curvature direction.
        assert!(matches!(
            solve_pcg(&m, &[1.0, 0.0], &SolveOptions::default()),
            Err(FemError::NotSpd { .. })
        ));
    }

    #[test]
    fn pcg_reports_achieved_residual_on_iteration_cap() {
        // Ill-conditioned diagonal with a one-iteration budget.
        let mut m = CsrMatrix::from_pattern(&[vec![0], vec![1], vec![2]]);
        m.add(0, 0, 1.0);
        m.add(1, 1, 1e-8);
        m.add(2, 2, 1e8);
        // Jacobi makes diagonal systems converge instantly, so couple rows.
        let mut coupled = CsrMatrix::from_pattern(&[vec![0, 1, 2], vec![0, 1, 2], vec![0, 1, 2]]);
        for i in 0..3 {
            coupled.add(i, i, 10.0_f64.powi(4 * i as i32 - 4));
            for j in 0..3 {
                if i != j {
                    coupled.add(i, j, 1e-5);
                }
            }
        }
        let opts = SolveOptions { rel_tolerance: 1e-14, max_iterations: 1 };
        match solve_pcg(&coupled, &[1.0, 1.0, 1.0], &opts) {
            Err(FemError::NonConvergence { achieved, iterations, .. }) => {
                assert_eq!(iterations, 1);
                assert!(achieved.is_finite());
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn matvec_matches_dense_reference() {
        let m = dense_2x2(4.0, 1.0, 1.0, 3.0);
        let mut y = vec![0.0; 2];
        m.matvec(&[2.0, -1.0], &mut y);
        assert_eq!(y, vec![7.0, -1.0]);
    }

    #[test]
    fn elimination_keeps_symmetry() {
        let mut m = dense_2x2(4.0, 1.0, 1.0, 3.0);
        m.eliminate_row_col(0);
        m.set_diagonal(0, 3.5);
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.get(1, 0), 0.0);
        assert_eq!(m.get(0, 0), 3.5);
        assert_eq!(m.asymmetry(), 0.0);
    }
}
