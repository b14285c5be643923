//! Cell-centered uniform grid on `[0, L]`.
//!
//! Cell `i` covers `[i*h, (i+1)*h]` with `h = L/n`; values live at cell
//! centers `x_i = (i + 1/2) h`. This placement keeps the Neumann Laplacian
//! symmetric (mirror ghost cells) and lets a piecewise profile put its jump
//! on a cell interface.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Shape(alloc::format!("grid needs n >= 2, got {n}")));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Parameter(alloc::format!(
                "domain length must be positive, got {length}"
            )));
        }
        Ok(Self { n, length })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Cell width `h = L/n`.
    #[inline]
    pub fn h(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Center of cell `i`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h()
    }

    pub fn cell_centers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Midpoint-rule integral of cell values over `[0, L]`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n);
        self.h() * values.iter().sum::<f64>()
    }

    /// Discrete `L^2(0, L)` norm of cell values.
    pub fn l2_norm(&self, values: &[f64]) -> f64 {
        (self.h() * values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }
}

/// Max-norm of a slice.
pub fn sup_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centers_cover_interval() {
        let g = Grid::new(4, 2.0).unwrap();
        assert_eq!(g.h(), 0.5);
        assert_eq!(g.cell_centers(), alloc::vec![0.25, 0.75, 1.25, 1.75]);
    }

    #[test]
    fn midpoint_integrates_constants_exactly() {
        let g = Grid::new(17, 3.0).unwrap();
        let vals = alloc::vec![2.0; 17];
        assert!((g.integrate(&vals) - 6.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Grid::new(1, 1.0).is_err());
        assert!(Grid::new(8, 0.0).is_err());
        assert!(Grid::new(8, -1.0).is_err());
    }
}
