//! Shared builders and independent oracles for the integration suites.
//!
//! The phase-plane time map lives here so the shooting tests check against
//! quadrature, not against the implementation they exercise.

#![allow(dead_code)]

use rdode_core::grid::Grid;
use rdode_core::kinetics::{CarcinogenesisRates, KineticModel};
use rdode_core::profile1d::{
    solve_branch, shoot_stationary, Branch, ShootOpts, StationaryProfile,
};

pub fn gray_scott(k: f64) -> (KineticModel, Branch) {
    let model = KineticModel::gray_scott(0.04, k).unwrap();
    let branch = solve_branch(&model, (0.02, 1.2), 1.0, "positive").unwrap();
    (model, branch)
}

pub fn gray_scott_profiles(k: f64, length: f64, n: usize) -> (KineticModel, Branch, Vec<StationaryProfile>) {
    let (model, branch) = gray_scott(k);
    let grid = Grid::new(n, length).unwrap();
    let mut opts = ShootOpts::new((0.03, 0.78));
    opts.scan_points = 384;
    let (profiles, _) = shoot_stationary(&model, &branch, grid, &opts).unwrap();
    (model, branch, profiles)
}

pub fn gierer_meinhardt_profiles(
    p: f64,
    q: f64,
    r: f64,
    s: f64,
    tau: f64,
    length: f64,
    n: usize,
) -> (KineticModel, Branch, Vec<StationaryProfile>) {
    let model = KineticModel::gierer_meinhardt(p, q, r, s, tau).unwrap();
    let branch = solve_branch(&model, (0.05, 2.5), 1.0, "positive").unwrap();
    let exponent = q * r / (p - 1.0) - s;
    // orbits live inside the homoclinic loop through V = 0
    let v_hom = ((exponent + 1.0) / 2.0).powf(1.0 / (exponent - 1.0));
    let grid = Grid::new(n, length).unwrap();
    let mut opts = ShootOpts::new((0.08, v_hom - 0.04));
    opts.scan_points = 384;
    let (profiles, _) = shoot_stationary(&model, &branch, grid, &opts).unwrap();
    (model, branch, profiles)
}

pub fn carcinogenesis_rates(kappa0: f64) -> CarcinogenesisRates {
    CarcinogenesisRates { a: 4.0, dc: 1.0, db: 1.0, d: 1.0, dg: 1.0, kappa0 }
}

/// Domain length `factor * π / sqrt(h'(v_center))`: the linear half-period
/// at the touched center times a factor > 1, so a mode-1 orbit exists with
/// a moderate amplitude.
pub fn mode_one_length(model: &KineticModel, branch: &Branch, v_center: f64, factor: f64) -> f64 {
    let hp = rdode_core::profile1d::reduced_h(model, branch).h_prime(v_center).unwrap();
    assert!(hp > 0.0, "center must have h' > 0, got {hp}");
    factor * core::f64::consts::PI / hp.sqrt()
}

pub fn carcinogenesis_profiles(
    kappa0: f64,
    length_factor: f64,
    n: usize,
) -> (KineticModel, Branch, Vec<StationaryProfile>) {
    let rates = carcinogenesis_rates(kappa0);
    let eq = rdode_core::steady::carcinogenesis_equilibria(&rates).unwrap();
    assert!(eq.exists, "need two positive states for profiles");
    let model = KineticModel::carcinogenesis2(rates).unwrap();
    let branch = solve_branch(&model, (0.002, eq.w_plus + 0.5), 1.0, "positive").unwrap();
    let length = mode_one_length(&model, &branch, eq.w_minus, length_factor);
    let grid = Grid::new(n, length).unwrap();
    let mut opts = ShootOpts::new((0.004, eq.w_plus - 0.02));
    opts.scan_points = 384;
    let (profiles, _) = shoot_stationary(&model, &branch, grid, &opts).unwrap();
    (model, branch, profiles)
}

/// Half-period of the orbit of `V'' + h(V) = 0` through `(s, 0)`:
/// `T(s) = ∫ dV / sqrt(2 (P(s) - P(V)))` between the turning points, by
/// midpoint quadrature after the angular substitution that removes the
/// square-root endpoint singularities.
pub fn half_period<H, P>(h: H, potential: P, s: f64, other_turning: f64) -> f64
where
    H: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    let _ = h;
    let (lo, hi) = if s < other_turning { (s, other_turning) } else { (other_turning, s) };
    let mid = 0.5 * (lo + hi);
    let rad = 0.5 * (hi - lo);
    let e = potential(s);
    let nodes = 1 << 14;
    let mut acc = 0.0;
    for i in 0..nodes {
        let theta = -core::f64::consts::FRAC_PI_2
            + core::f64::consts::PI * (i as f64 + 0.5) / nodes as f64;
        let v = mid + rad * theta.sin();
        let denom = 2.0 * (e - potential(v));
        if denom <= 0.0 {
            continue; // roundoff at the turning points
        }
        acc += rad * theta.cos() / denom.sqrt();
    }
    acc * core::f64::consts::PI / nodes as f64
}

/// Restrict a cell-centered field to the twice-coarser grid by pairwise
/// averaging (the averages sit exactly at the coarse cell centers).
pub fn restrict_by_two(fine: &[f64]) -> Vec<f64> {
    fine.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
}
