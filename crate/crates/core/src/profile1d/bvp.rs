//! Damped-Newton finite-difference solver for the stationary Neumann problem
//! `Δ_h V + h(x, V) = 0` with a possibly cell-dependent (piecewise) reaction.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{sup_norm, Grid};
use crate::linalg::{solve_tridiagonal, NeumannLaplacian};
use crate::profile1d::branch::ReducedH;

/// Reaction term of the stationary problem, allowed to differ per cell so
/// weak profiles can switch branches at cell interfaces.
pub trait CellPotential {
    fn h(&self, cell: usize, v: f64) -> Result<f64>;
    fn h_prime(&self, cell: usize, v: f64) -> Result<f64>;
}

impl CellPotential for ReducedH<'_> {
    fn h(&self, _cell: usize, v: f64) -> Result<f64> {
        ReducedH::h(self, v)
    }

    fn h_prime(&self, _cell: usize, v: f64) -> Result<f64> {
        ReducedH::h_prime(self, v)
    }
}

/// Homogeneous potential from plain closures (test harnesses, synthetic h).
pub struct FnPotential<H, D> {
    pub h: H,
    pub h_prime: D,
}

impl<H, D> CellPotential for FnPotential<H, D>
where
    H: Fn(f64) -> Result<f64>,
    D: Fn(f64) -> Result<f64>,
{
    fn h(&self, _cell: usize, v: f64) -> Result<f64> {
        (self.h)(v)
    }

    fn h_prime(&self, _cell: usize, v: f64) -> Result<f64> {
        (self.h_prime)(v)
    }
}

fn residual(pot: &dyn CellPotential, lap: &NeumannLaplacian, v: &[f64], out: &mut [f64]) -> Result<()> {
    lap.apply(v, out);
    for (i, o) in out.iter_mut().enumerate() {
        *o += pot.h(i, v[i])?;
    }
    Ok(())
}

/// Newton iteration on the discrete system from the given initial vector.
///
/// Converges to solver precision (the residual floor is set by cancellation
/// in `Δ_h`, about `machine_eps * |V| / h²`).
pub fn solve_bvp(pot: &dyn CellPotential, grid: Grid, v_init: &[f64]) -> Result<Vec<f64>> {
    let n = grid.n();
    if v_init.len() != n {
        return Err(Error::Shape("BVP initial vector length mismatch".into()));
    }
    let lap = NeumannLaplacian::new(grid);
    let h2 = grid.h() * grid.h();
    // residual floor: cancellation in Δ_h is ~ eps |V| / h²
    let tol = 40.0 * f64::EPSILON * (1.0 + sup_norm(v_init) / h2);

    let mut v = v_init.to_vec();
    let mut res = vec![0.0; n];
    residual(pot, &lap, &v, &mut res)?;
    let mut res_norm = sup_norm(&res);

    for _ in 0..60 {
        if res_norm <= tol {
            return Ok(v);
        }
        let mut diag = lap.diagonal();
        for i in 0..n {
            diag[i] += pot.h_prime(i, v[i])?;
        }
        let off = vec![lap.offdiagonal(); n - 1];
        let delta = solve_tridiagonal(&off, &diag, &off, &res)?;

        let mut lambda = 1.0;
        let mut accepted = false;
        let mut trial_res = vec![0.0; n];
        for _ in 0..30 {
            let trial: Vec<f64> = v.iter().zip(&delta).map(|(vi, di)| vi - lambda * di).collect();
            match residual(pot, &lap, &trial, &mut trial_res) {
                Ok(()) => {
                    let trial_norm = sup_norm(&trial_res);
                    if trial_norm < res_norm {
                        v = trial;
                        core::mem::swap(&mut res, &mut trial_res);
                        res_norm = trial_norm;
                        accepted = true;
                        break;
                    }
                }
                Err(_) => {}
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res_norm <= 1e3 * tol {
        Ok(v)
    } else {
        Err(Error::Convergence(alloc::format!(
            "BVP Newton stalled at residual {res_norm}"
        )))
    }
}
