//! Shooting construction of non-constant stationary profiles.
//!
//! The phase-plane system `(V, W)' = (W, -h(V))` is integrated from
//! `(s, 0)`; a scan over initial values `s` brackets sign changes of the
//! shooting map `s -> W(L; s)` and bisection enforces the right Neumann
//! condition. Constant shots are dropped, mirror orbits deduplicated, and
//! the survivors are Newton-polished onto the discrete stationary system.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::ivp::{integrate, IvpOutcome, Trajectory};
use crate::kinetics::KineticModel;
use crate::profile1d::branch::{reduced_h, Branch};
use crate::profile1d::bvp::solve_bvp;
use crate::profile1d::{StationaryProfile, CONSTANT_TOL};

/// Scan/bisection controls for the shooting driver.
#[derive(Debug, Clone)]
pub struct ShootOpts {
    /// Initial values `V(0)` are scanned over this interval.
    pub v0_range: (f64, f64),
    /// Number of scan points (default 512).
    pub scan_points: usize,
    /// Keep at most this many distinct profiles.
    pub max_profiles: usize,
    /// Relative tolerance of the adaptive integrator.
    pub rtol: f64,
    /// Absolute tolerance of the adaptive integrator.
    pub atol: f64,
    /// Skip the discrete Newton polish (raw orbit samples).
    pub skip_polish: bool,
}

impl ShootOpts {
    pub fn new(v0_range: (f64, f64)) -> Self {
        Self {
            v0_range,
            scan_points: 512,
            max_profiles: 8,
            rtol: 1e-10,
            atol: 1e-12,
            skip_polish: false,
        }
    }
}

/// One orbit satisfying both Neumann conditions.
#[derive(Debug, Clone)]
pub struct ScalarShot {
    pub v0: f64,
    pub trajectory: Trajectory,
    pub v_min: f64,
    pub v_max: f64,
    pub oscillations: usize,
}

/// Scan bookkeeping, reported alongside the orbits.
#[derive(Debug, Clone, Default)]
pub struct ShootDiagnostics {
    pub scanned: usize,
    /// Initial values whose orbit blew up or left the admissible region.
    pub ivp_failures: usize,
    /// Sign changes of the shooting map that were bisected.
    pub crossings: usize,
}

fn orbit_stats(traj: &Trajectory, length: f64) -> (f64, f64, usize) {
    let samples = 512;
    let mut v_min = f64::INFINITY;
    let mut v_max = f64::NEG_INFINITY;
    let mut last_sign = 0i8;
    let mut osc = 0usize;
    let mut w_scale: f64 = 0.0;
    for i in 0..=samples {
        let y = traj.sample(length * i as f64 / samples as f64);
        w_scale = w_scale.max(y[1].abs());
        v_min = v_min.min(y[0]);
        v_max = v_max.max(y[0]);
    }
    let tol = 1e-6 * (1.0 + w_scale);
    for i in 0..=samples {
        let y = traj.sample(length * i as f64 / samples as f64);
        if y[1].abs() <= tol {
            continue;
        }
        let s = if y[1] > 0.0 { 1i8 } else { -1i8 };
        if last_sign != 0 && s != last_sign {
            osc += 1;
        }
        last_sign = s;
    }
    (v_min, v_max, osc)
}

/// Shoot the scalar problem `V'' + h(V) = 0`, `V'(0) = V'(L) = 0`.
///
/// Returns distinct non-constant orbits sorted by oscillation count, plus
/// scan diagnostics. An empty list with diagnostics is the "no sign change
/// found" outcome.
pub fn shoot_orbits<H>(
    h: H,
    length: f64,
    opts: &ShootOpts,
) -> Result<(Vec<ScalarShot>, ShootDiagnostics)>
where
    H: Fn(f64) -> Result<f64>,
{
    if !(length > 0.0) {
        return Err(Error::Parameter("domain length must be positive".into()));
    }
    let (s_lo, s_hi) = opts.v0_range;
    if !(s_lo < s_hi) {
        return Err(Error::Parameter("v0 scan range must have positive length".into()));
    }
    let rhs = |_x: f64, y: [f64; 2]| -> Result<[f64; 2]> { Ok([y[1], -h(y[0])?]) };
    let cap = 1e6 * (1.0 + s_hi.abs());
    let shot = |s: f64| -> Result<Option<Trajectory>> {
        match integrate(rhs, 0.0, [s, 0.0], length, opts.rtol, opts.atol, cap)? {
            IvpOutcome::Complete(t) => Ok(Some(t)),
            IvpOutcome::Failed { .. } => Ok(None),
        }
    };

    let mut diag = ShootDiagnostics::default();
    let npts = opts.scan_points.max(8);
    let mut scan: Vec<(f64, Option<f64>, Option<Trajectory>)> = Vec::with_capacity(npts);
    for i in 0..npts {
        let s = s_lo + (s_hi - s_lo) * i as f64 / (npts - 1) as f64;
        diag.scanned += 1;
        match shot(s)? {
            Some(t) => {
                let m = t.end().1[1];
                scan.push((s, Some(m), Some(t)));
            }
            None => {
                diag.ivp_failures += 1;
                scan.push((s, None, None));
            }
        }
    }

    let mut shots: Vec<ScalarShot> = Vec::new();
    for w in 0..npts - 1 {
        let (s_a, m_a, _) = &scan[w];
        let (s_b, m_b, _) = &scan[w + 1];
        let (Some(ma), Some(mb)) = (m_a, m_b) else { continue };
        if ma * mb > 0.0 {
            continue;
        }
        diag.crossings += 1;
        // bisect the shooting map on [s_a, s_b]
        let (mut lo, mut hi, mut flo) = (*s_a, *s_b, *ma);
        let mut found: Option<(f64, Trajectory)> = None;
        for _ in 0..120 {
            let mid = 0.5 * (lo + hi);
            let Some(t) = shot(mid)? else {
                // orbit lost inside the bracket; shrink towards the side
                // that still integrates
                hi = mid;
                continue;
            };
            let (_, y_end) = t.end();
            let v_sup = orbit_stats(&t, length).1.abs();
            if y_end[1].abs() < 1e-10 * (1.0 + v_sup) || hi - lo < 4.0 * f64::EPSILON * (1.0 + mid.abs()) {
                found = Some((mid, t));
                break;
            }
            if flo * y_end[1] <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
                flo = y_end[1];
            }
        }
        let Some((v0, traj)) = found else { continue };
        let (v_min, v_max, oscillations) = orbit_stats(&traj, length);
        if v_max - v_min < CONSTANT_TOL {
            continue; // equilibrium shot
        }
        let duplicate = shots.iter().any(|sh| {
            sh.oscillations == oscillations
                && (sh.v_min - v_min).abs() < 1e-5 * (1.0 + v_max.abs())
                && (sh.v_max - v_max).abs() < 1e-5 * (1.0 + v_max.abs())
        });
        if !duplicate {
            shots.push(ScalarShot { v0, trajectory: traj, v_min, v_max, oscillations });
        }
    }
    shots.sort_by(|a, b| {
        (a.oscillations, a.v0).partial_cmp(&(b.oscillations, b.v0)).unwrap()
    });
    shots.truncate(opts.max_profiles);
    Ok((shots, diag))
}

/// Shoot stationary profiles of the full model on the given branch and
/// polish each onto the discrete system; `U` is lifted through the branch.
pub fn shoot_stationary(
    model: &KineticModel,
    branch: &Branch,
    grid: Grid,
    opts: &ShootOpts,
) -> Result<(Vec<StationaryProfile>, ShootDiagnostics)> {
    let rh = reduced_h(model, branch);
    let (shots, diag) = shoot_orbits(|v| rh.h(v), grid.length(), opts)?;
    let mut profiles = Vec::with_capacity(shots.len());
    for shot in &shots {
        let sampled: Vec<f64> =
            (0..grid.n()).map(|i| shot.trajectory.sample(grid.x(i))[0]).collect();
        let v = if opts.skip_polish { sampled } else { solve_bvp(&rh, grid, &sampled)? };
        let mut u = Vec::with_capacity(grid.n());
        for vi in &v {
            u.push(branch.u_at(model, *vi)?);
        }
        let profile = StationaryProfile::from_samples(
            model,
            grid,
            u,
            v,
            alloc::vec![0u16; grid.n()],
            alloc::vec![alloc::string::String::from(branch.label())],
        )?;
        if !profile.is_constant() {
            profiles.push(profile);
        }
    }
    Ok((profiles, diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile1d::branch::solve_branch;

    #[test]
    fn equilibrium_start_is_discarded() {
        // h(V) = 1 - V has the single root V = 1; shots from the root are
        // constant and the scan finds nothing else on a short domain
        let opts = ShootOpts::new((0.99, 1.01));
        let (shots, diag) = shoot_orbits(|v: f64| Ok(1.0 - v), 1.0, &opts).unwrap();
        assert!(shots.is_empty());
        assert_eq!(diag.scanned, 512);
    }

    #[test]
    fn no_crossing_reports_empty_with_diagnostics() {
        // h = -V: monotone decay, no interior turning of the shooting map on
        // a positive scan range
        let opts = ShootOpts::new((0.5, 1.5));
        let (shots, diag) = shoot_orbits(|v: f64| Ok(-v), 2.0, &opts).unwrap();
        assert!(shots.is_empty());
        assert!(diag.scanned > 0);
    }

    #[test]
    fn gray_scott_mode_one_profile() {
        let model = KineticModel::gray_scott(0.04, 0.04).unwrap();
        let branch = solve_branch(&model, (0.02, 1.2), 1.0, "positive").unwrap();
        let grid = Grid::new(400, 15.0).unwrap();
        let mut opts = ShootOpts::new((0.03, 0.78));
        opts.scan_points = 256;
        let (profiles, _) = shoot_stationary(&model, &branch, grid, &opts).unwrap();
        assert!(!profiles.is_empty(), "expected a mode-1 profile at L = 15");
        let p = &profiles[0];
        assert_eq!(p.oscillations, 0, "first profile should be monotone");
        // straddles the touchable root V = 0.2
        let (lo, hi) = p.v_range();
        assert!(lo < 0.2 && 0.2 < hi, "range ({lo}, {hi})");
        // discrete stationarity after polish
        assert!(p.residual_max < 1e-9, "residual {}", p.residual_max);
        assert!(p.g_integral.abs() < 1e-9);
    }
}
