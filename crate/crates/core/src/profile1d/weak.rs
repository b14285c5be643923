//! Piecewise (weak) stationary profiles: `U` switches branches of
//! `f(U, V) = 0` at user-chosen interfaces while `V` solves the continuous
//! Neumann problem with the piecewise reaction.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kinetics::KineticModel;
use crate::profile1d::branch::Branch;
use crate::profile1d::bvp::{solve_bvp, CellPotential};
use crate::profile1d::StationaryProfile;

struct PiecewisePotential<'a> {
    model: &'a KineticModel,
    branches: &'a [Branch],
    cell_branch: &'a [u16],
}

impl CellPotential for PiecewisePotential<'_> {
    fn h(&self, cell: usize, v: f64) -> Result<f64> {
        let br = &self.branches[self.cell_branch[cell] as usize];
        let u = br.u_at(self.model, v)?;
        Ok(self.model.g(u, v)? / self.model.diffusion())
    }

    fn h_prime(&self, cell: usize, v: f64) -> Result<f64> {
        let br = &self.branches[self.cell_branch[cell] as usize];
        let u = br.u_at(self.model, v)?;
        let jac = self.model.jacobian(u, v)?;
        if jac.fu.abs() <= 1e-8 {
            return Err(Error::Hypothesis(alloc::format!("fold on branch at V = {v}")));
        }
        Ok((-(jac.fv / jac.fu) * jac.gu + jac.gv) / self.model.diffusion())
    }
}

/// Map cell centers to segments delimited by `switch_points` (which are
/// snapped to cell interfaces by the center comparison).
fn assign_cells(grid: Grid, switch_points: &[f64], segments: usize) -> Result<Vec<u16>> {
    let length = grid.length();
    let mut sorted = switch_points.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if sorted.iter().any(|x| !(*x > 0.0 && *x < length)) {
        return Err(Error::Parameter("switch points must lie strictly inside (0, L)".into()));
    }
    if sorted.len() + 1 != segments {
        return Err(Error::Parameter(alloc::format!(
            "{} switch points need {} branches, got {segments}",
            sorted.len(),
            sorted.len() + 1
        )));
    }
    let mut cells = Vec::with_capacity(grid.n());
    for i in 0..grid.n() {
        let x = grid.x(i);
        let seg = sorted.iter().filter(|sp| x > **sp).count();
        cells.push(seg as u16);
    }
    Ok(cells)
}

/// Assemble a weak profile: branch `j` on the `j`-th segment, `V` from a
/// damped-Newton solve of the piecewise Neumann problem.
///
/// `v_init` seeds the Newton iteration; without it, constant seeds are taken
/// from the roots of the cell-averaged reaction (those capture the
/// small-domain limit, where the profile hugs a single level).
pub fn assemble_weak_profile(
    model: &KineticModel,
    branches: &[Branch],
    switch_points: &[f64],
    grid: Grid,
    v_init: Option<&[f64]>,
) -> Result<StationaryProfile> {
    if branches.is_empty() {
        return Err(Error::Parameter("need at least one branch".into()));
    }
    let cell_branch = assign_cells(grid, switch_points, branches.len())?;
    let pot = PiecewisePotential { model, branches, cell_branch: &cell_branch };

    let v = match v_init {
        Some(init) => solve_bvp(&pot, grid, init)?,
        None => {
            let mut solved = None;
            for seed in constant_seeds(&pot, branches, grid.n())? {
                let init = alloc::vec![seed; grid.n()];
                if let Ok(v) = solve_bvp(&pot, grid, &init) {
                    solved = Some(v);
                    break;
                }
            }
            solved.ok_or_else(|| {
                Error::Convergence("weak BVP Newton diverged from every constant seed".into())
            })?
        }
    };

    let mut u = Vec::with_capacity(grid.n());
    for (i, vi) in v.iter().enumerate() {
        u.push(branches[cell_branch[i] as usize].u_at(model, *vi)?);
    }
    let names: Vec<String> = branches.iter().map(|b| String::from(b.label())).collect();
    StationaryProfile::from_samples(model, grid, u, v, cell_branch, names)
}

/// Roots of the cell-averaged reaction over the common branch interval.
fn constant_seeds(
    pot: &PiecewisePotential<'_>,
    branches: &[Branch],
    n: usize,
) -> Result<Vec<f64>> {
    let lo = branches.iter().map(|b| b.v_interval().0).fold(f64::NEG_INFINITY, f64::max);
    let hi = branches.iter().map(|b| b.v_interval().1).fold(f64::INFINITY, f64::min);
    if !(lo < hi) {
        return Err(Error::Parameter("branch intervals do not overlap".into()));
    }
    let mean_h = |v: f64| -> Result<f64> {
        let mut acc = 0.0;
        for cell in 0..n {
            acc += pot.h(cell, v)?;
        }
        Ok(acc / n as f64)
    };
    let scan = 256;
    let mut seeds = Vec::new();
    let mut prev_v = lo + 1e-9 * (hi - lo);
    let mut prev = mean_h(prev_v);
    for i in 1..=scan {
        let v = lo + (hi - lo) * (i as f64 - 0.5) / scan as f64;
        let cur = mean_h(v);
        if let (Ok(a), Ok(b)) = (&prev, &cur) {
            if a * b <= 0.0 {
                if let Ok(root) = crate::roots::bisect(&mean_h, prev_v, v, 1e-12 * (1.0 + hi)) {
                    seeds.push(root);
                }
            }
        }
        prev_v = v;
        prev = cur;
    }
    if seeds.is_empty() {
        // fall back to the interval midpoint
        seeds.push(0.5 * (lo + hi));
    }
    Ok(seeds)
}
