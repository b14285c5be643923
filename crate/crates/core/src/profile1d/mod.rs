//! Non-constant stationary solutions on `[0, L]`.
//!
//! A regular profile solves `f(U, V) = 0` through a single branch
//! `U = k(V)` and the scalar Neumann problem `ΔV + h(V) = 0` with
//! `h = g(k(V), V)/D`; a weak profile switches branches at user-chosen
//! interfaces, keeping `V` continuous while `U` jumps.
//!
//! Construction runs in two stages: adaptive shooting locates orbits of
//! `V'' + h(V) = 0` with `V'(0) = V'(L) = 0`, then a finite-difference
//! Newton polish makes the sampled profile solve the *discrete* stationary
//! system to solver precision, which the spectrum and evolution modules rely
//! on.

pub mod branch;
pub mod bvp;
pub mod shoot;
pub mod weak;

pub use branch::{reduced_h, solve_branch, Branch, ReducedH};
pub use bvp::{solve_bvp, CellPotential, FnPotential};
pub use shoot::{shoot_orbits, shoot_stationary, ScalarShot, ShootDiagnostics, ShootOpts};
pub use weak::assemble_weak_profile;

use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{sup_norm, Grid};
use crate::interp::MonotoneCubic;
use crate::kinetics::KineticModel;
use crate::linalg::NeumannLaplacian;
use crate::steady::ConstantState;

/// Profiles with `max V - min V` below this are constants and discarded by
/// the shooting driver.
pub const CONSTANT_TOL: f64 = 1e-6;

/// A grid-sampled stationary solution `(U(x), V(x))` with per-cell branch
/// assignment and the pointwise Jacobian fields along the profile.
#[derive(Debug, Clone)]
pub struct StationaryProfile {
    pub grid: Grid,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Branch index per cell (into `branch_names`).
    pub branch_cell: Vec<u16>,
    pub branch_names: Vec<String>,
    pub fu: Vec<f64>,
    pub fv: Vec<f64>,
    pub gu: Vec<f64>,
    pub gv: Vec<f64>,
    /// `sup |Δ_h V + g/D|` over the grid.
    pub residual_max: f64,
    /// Midpoint-rule `∫ g/D dx` (vanishes for Neumann stationary states).
    pub g_integral: f64,
    /// Interior extrema count of `V` (0 for monotone profiles).
    pub oscillations: usize,
}

impl StationaryProfile {
    /// Assemble from sampled fields, computing the pointwise Jacobians and
    /// the stationarity diagnostics.
    pub fn from_samples(
        model: &KineticModel,
        grid: Grid,
        u: Vec<f64>,
        v: Vec<f64>,
        branch_cell: Vec<u16>,
        branch_names: Vec<String>,
    ) -> Result<Self> {
        let n = grid.n();
        if u.len() != n || v.len() != n || branch_cell.len() != n {
            return Err(Error::Shape("profile field lengths must match the grid".into()));
        }
        let mut fu = Vec::with_capacity(n);
        let mut fv = Vec::with_capacity(n);
        let mut gu = Vec::with_capacity(n);
        let mut gv = Vec::with_capacity(n);
        for i in 0..n {
            let j = model.jacobian(u[i], v[i])?;
            fu.push(j.fu);
            fv.push(j.fv);
            gu.push(j.gu);
            gv.push(j.gv);
        }
        let lap = NeumannLaplacian::new(grid);
        let mut res = alloc::vec![0.0; n];
        lap.apply(&v, &mut res);
        let d = model.diffusion();
        for i in 0..n {
            res[i] += model.g(u[i], v[i])? / d;
        }
        let residual_max = sup_norm(&res);
        let mut g_over_d = alloc::vec![0.0; n];
        for i in 0..n {
            g_over_d[i] = model.g(u[i], v[i])? / d;
        }
        let g_integral = grid.integrate(&g_over_d);
        let oscillations = count_interior_extrema(&v);
        Ok(Self {
            grid,
            u,
            v,
            branch_cell,
            branch_names,
            fu,
            fv,
            gu,
            gv,
            residual_max,
            g_integral,
            oscillations,
        })
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn is_constant(&self) -> bool {
        let (lo, hi) = self.v_range();
        hi - lo < CONSTANT_TOL
    }

    pub fn v_range(&self) -> (f64, f64) {
        let lo = self.v.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        let hi = self.v.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
        (lo, hi)
    }

    /// Interpolate onto a finer/coarser grid of `n` cells over the same
    /// interval. `V` moves by monotone-cubic interpolation, branch labels by
    /// nearest cell, and `U` is re-polished on `f(·, V) = 0` from the
    /// interpolated value, so the lift stays exact while jumps stay crisp.
    pub fn resample(&self, model: &KineticModel, n: usize) -> Result<Self> {
        if n == self.n() {
            return Ok(self.clone());
        }
        let grid = Grid::new(n, self.grid.length())?;
        let x_old = self.grid.cell_centers();
        let v_interp = MonotoneCubic::new(x_old.clone(), self.v.clone())?;
        let u_interp = MonotoneCubic::new(x_old.clone(), self.u.clone())?;
        let mut u = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        let mut branch_cell = Vec::with_capacity(n);
        let h_old = self.grid.h();
        for i in 0..n {
            let x = grid.x(i);
            let vi = v_interp.eval(x);
            let ug = u_interp.eval(x);
            let ui = crate::roots::newton_scalar(
                |uu| model.f(uu, vi),
                |uu| Ok(model.jacobian(uu, vi)?.fu),
                ug,
                1e-14 * (1.0 + ug.abs()),
                8,
            )
            .unwrap_or(ug);
            let nearest = ((x / h_old - 0.5).round().max(0.0) as usize).min(self.n() - 1);
            u.push(ui);
            v.push(vi);
            branch_cell.push(self.branch_cell[nearest]);
        }
        Self::from_samples(model, grid, u, v, branch_cell, self.branch_names.clone())
    }
}

fn count_interior_extrema(v: &[f64]) -> usize {
    let scale = sup_norm(v);
    let tol = 1e-9 * (1.0 + scale);
    let mut last_sign = 0i8;
    let mut count = 0usize;
    for w in v.windows(2) {
        let d = w[1] - w[0];
        if d.abs() <= tol {
            continue;
        }
        let s = if d > 0.0 { 1i8 } else { -1i8 };
        if last_sign != 0 && s != last_sign {
            count += 1;
        }
        last_sign = s;
    }
    count
}

/// Pointwise instability-condition report along a profile.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    /// `inf f_u` over the checked set (the lower end of the essential
    /// interval).
    pub lambda0: f64,
    /// `sup f_u` over the checked set.
    pub lambda_cap: f64,
    /// `min f_u > 0` on the checked set.
    pub autocatalysis: bool,
    /// `max f_v g_u < 0` on the checked set.
    pub compensation: bool,
    /// The largest value of the compensation field `f_v g_u`.
    pub compensation_max: f64,
    /// Number of grid points violating `f_v g_u < 0`.
    pub compensation_violations: usize,
    /// Whether the check ran on `{x : U(x) != 0}` only (weak variant for
    /// Malthusian nonlinearities `f = r(u,v) u`).
    pub support_restricted: bool,
    /// Cells excluded by the support restriction.
    pub zero_cells: usize,
    /// A point where `f_u(U, V)` passes the three-cell continuity test, if
    /// any (the witness the weak instability statements need).
    pub witness_x: Option<f64>,
}

/// Evaluate autocatalysis/compensation along the profile.
///
/// Cells with `U = 0` are excluded when present (the discontinuous-profile
/// variant); for profiles on a single positive branch the full grid is used.
pub fn check_instability_conditions(
    profile: &StationaryProfile,
    model: &KineticModel,
) -> Result<ConditionReport> {
    let n = profile.n();
    let u_scale = sup_norm(&profile.u);
    let u_tol = 1e-9 * (1.0 + u_scale);
    let support: Vec<bool> = profile.u.iter().map(|u| u.abs() > u_tol).collect();
    let zero_cells = support.iter().filter(|s| !**s).count();
    let support_restricted = zero_cells > 0;
    if zero_cells == n {
        return Err(Error::Hypothesis("profile has empty support (U = 0 everywhere)".into()));
    }

    let mut lambda0 = f64::INFINITY;
    let mut lambda_cap = f64::NEG_INFINITY;
    let mut comp_max = f64::NEG_INFINITY;
    let mut violations = 0usize;
    for i in 0..n {
        if !support[i] {
            continue;
        }
        lambda0 = lambda0.min(profile.fu[i]);
        lambda_cap = lambda_cap.max(profile.fu[i]);
        let comp = profile.fv[i] * profile.gu[i];
        comp_max = comp_max.max(comp);
        if comp >= 0.0 {
            violations += 1;
        }
    }

    // three-cell continuity witness: smallest local oscillation of f_u among
    // interior support cells
    let mut witness: Option<(f64, f64)> = None; // (oscillation, x)
    for i in 1..n - 1 {
        if support[i - 1] && support[i] && support[i + 1] {
            let w = &profile.fu[i - 1..=i + 1];
            let osc = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - w.iter().cloned().fold(f64::INFINITY, f64::min);
            if witness.map(|(o, _)| osc < o).unwrap_or(true) {
                witness = Some((osc, profile.grid.x(i)));
            }
        }
    }
    let witness_x = witness.and_then(|(osc, x)| {
        (osc <= 1e-3 * (1.0 + lambda_cap.abs())).then_some(x)
    });

    let _ = model; // the fields are already stored on the profile
    Ok(ConditionReport {
        lambda0,
        lambda_cap,
        autocatalysis: lambda0 > 0.0,
        compensation: comp_max < 0.0,
        compensation_max: comp_max,
        compensation_violations: violations,
        support_restricted,
        zero_cells,
        witness_x,
    })
}

/// Constant states touched by the profile: roots of the reduced reaction
/// inside the attained `V`-range, classified, paired with `h'` there.
pub fn touched_constant_states(
    profile: &StationaryProfile,
    rh: &ReducedH<'_>,
) -> Result<Vec<(ConstantState, f64)>> {
    let (lo, hi) = profile.v_range();
    let pad = 1e-7 * (1.0 + hi.abs());
    let roots = rh.roots(lo - pad, hi + pad)?;
    let mut out = Vec::with_capacity(roots.len());
    for (vbar, hp) in roots {
        let ubar = rh.branch().u_at(rh.model(), vbar)?;
        out.push((ConstantState::from_point(rh.model(), ubar, vbar)?, hp));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrema_counting() {
        assert_eq!(count_interior_extrema(&[0.0, 1.0, 2.0, 3.0]), 0);
        assert_eq!(count_interior_extrema(&[0.0, 1.0, 0.5, 0.2]), 1);
        assert_eq!(count_interior_extrema(&[0.0, 1.0, 0.0, 1.0, 0.0]), 3);
        assert_eq!(count_interior_extrema(&[1.0, 1.0, 1.0]), 0);
    }
}
