//! Tridiagonal kernels: Thomas solve, the Neumann Laplacian stencil and
//! inertia counts for symmetric tridiagonal matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Solve a tridiagonal system in place via the Thomas algorithm.
///
/// `lower` and `upper` have length `n - 1`; `diag` and `rhs` have length `n`.
/// Returns the solution vector. Fails on a vanishing pivot.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 || lower.len() != n - 1 || upper.len() != n - 1 || rhs.len() != n {
        return Err(Error::Shape(alloc::format!(
            "tridiagonal shapes: diag {}, lower {}, upper {}, rhs {}",
            n,
            lower.len(),
            upper.len(),
            rhs.len()
        )));
    }
    let mut c = vec![0.0; n - 1];
    let mut d = vec![0.0; n];
    let mut piv = diag[0];
    if piv == 0.0 {
        return Err(Error::Convergence("zero pivot in tridiagonal solve".into()));
    }
    if n > 1 {
        c[0] = upper[0] / piv;
    }
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - lower[i - 1] * c[i - 1];
        if piv == 0.0 {
            return Err(Error::Convergence("zero pivot in tridiagonal solve".into()));
        }
        if i < n - 1 {
            c[i] = upper[i] / piv;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Second-order Neumann Laplacian on a cell-centered grid.
///
/// Mirror ghost cells close the stencil: row 0 is `(-v0 + v1)/h^2`, interior
/// rows `(v[i-1] - 2 v[i] + v[i+1])/h^2`. The matrix is symmetric with zero
/// row sums.
#[derive(Debug, Clone)]
pub struct NeumannLaplacian {
    grid: Grid,
}

impl NeumannLaplacian {
    pub fn new(grid: Grid) -> Self {
        Self { grid }
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// `out = Δ_h v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let n = self.grid.n();
        debug_assert_eq!(v.len(), n);
        debug_assert_eq!(out.len(), n);
        let inv_h2 = 1.0 / (self.grid.h() * self.grid.h());
        out[0] = (v[1] - v[0]) * inv_h2;
        for i in 1..n - 1 {
            out[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * inv_h2;
        }
        out[n - 1] = (v[n - 2] - v[n - 1]) * inv_h2;
    }

    /// Diagonal of `Δ_h` (entries `-1/h^2` at the ends, `-2/h^2` inside).
    pub fn diagonal(&self) -> Vec<f64> {
        let n = self.grid.n();
        let inv_h2 = 1.0 / (self.grid.h() * self.grid.h());
        let mut d = vec![-2.0 * inv_h2; n];
        d[0] = -inv_h2;
        d[n - 1] = -inv_h2;
        d
    }

    /// Off-diagonal value `1/h^2`.
    pub fn offdiagonal(&self) -> f64 {
        1.0 / (self.grid.h() * self.grid.h())
    }

    /// Solve `(I - c Δ_h) x = rhs` (backward-Euler diffusion step).
    pub fn solve_identity_minus(&self, c: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.grid.n();
        let off = -c * self.offdiagonal();
        let lower = vec![off; n - 1];
        let upper = vec![off; n - 1];
        let diag: Vec<f64> = self.diagonal().iter().map(|d| 1.0 - c * d).collect();
        solve_tridiagonal(&lower, &diag, &upper, rhs)
    }
}

/// Number of negative eigenvalues of the symmetric tridiagonal matrix with
/// the given diagonal and off-diagonal, by the Sturm pivot recursion.
///
/// Tiny pivots are pushed to `-pivmin`, matching the usual bisection
/// safeguard.
pub fn negative_eigenvalue_count(diag: &[f64], off: &[f64], pivmin: f64) -> usize {
    debug_assert_eq!(off.len() + 1, diag.len());
    let mut count = 0usize;
    let mut d = diag[0];
    if d.abs() < pivmin {
        d = -pivmin;
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        d = diag[i] - off[i - 1] * off[i - 1] / d;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}
