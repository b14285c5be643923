//! Constant steady states: multi-start Newton search, kinetic and
//! diffusion-driven-instability classification, the touch inequality
//! `det J / f_u`, and closed forms for the carcinogenesis equilibria.

use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::kinetics::{CarcinogenesisRates, Jacobian2, KineticModel};
use crate::roots::newton_2d;

/// Residual bound certifying a root of `(f, g) = (0, 0)`.
pub const ROOT_TOL: f64 = 1e-10;
/// Roots closer than this (max-norm) are the same state.
pub const DEDUP_RADIUS: f64 = 1e-8;
/// `|trace|` / `|det|` / `|f_u|` below this count as degenerate.
pub const MARGINAL_TOL: f64 = 1e-8;

/// Stability of a constant state for the kinetic ODE system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KineticClass {
    Stable,
    Unstable,
    /// Trace or determinant within tolerance of zero; the non-degeneracy
    /// hypothesis fails and no verdict is issued.
    Marginal,
}

impl KineticClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            KineticClass::Stable => "stable",
            KineticClass::Unstable => "unstable",
            KineticClass::Marginal => "marginal",
        }
    }
}

/// The three non-degeneracy tests: `trace != 0`, `det != 0`, `f_u != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NondegeneracyFlags {
    pub trace_nonzero: bool,
    pub det_nonzero: bool,
    pub fu_nonzero: bool,
}

impl NondegeneracyFlags {
    pub fn all(&self) -> bool {
        self.trace_nonzero && self.det_nonzero && self.fu_nonzero
    }
}

/// A classified root of `(f, g) = (0, 0)`.
#[derive(Debug, Clone)]
pub struct ConstantState {
    pub u: f64,
    pub v: f64,
    pub jac: Jacobian2,
    pub trace: f64,
    pub det: f64,
    pub nondegenerate: NondegeneracyFlags,
    pub kinetic_class: KineticClass,
    pub ddi: bool,
    /// `det J / f_u`; `None` when `f_u` is degenerate.
    pub touch_value: Option<f64>,
}

impl ConstantState {
    /// Classify a point that is already a root (residuals are re-checked).
    pub fn from_point(model: &KineticModel, u: f64, v: f64) -> Result<Self> {
        let f = model.f(u, v)?;
        let g = model.g(u, v)?;
        let scale = 1.0 + u.abs() + v.abs();
        if f.abs() > 1e-7 * scale || g.abs() > 1e-7 * scale {
            return Err(Error::Hypothesis(alloc::format!(
                "({u}, {v}) is not a constant steady state: residual ({f}, {g})"
            )));
        }
        let jac = model.jacobian(u, v)?;
        let trace = jac.trace();
        let det = jac.det();
        let nondegenerate = NondegeneracyFlags {
            trace_nonzero: trace.abs() > MARGINAL_TOL,
            det_nonzero: det.abs() > MARGINAL_TOL,
            fu_nonzero: jac.fu.abs() > MARGINAL_TOL,
        };
        let kinetic_class = classify_kinetic(trace, det, MARGINAL_TOL);
        Ok(Self {
            u,
            v,
            jac,
            trace,
            det,
            nondegenerate,
            kinetic_class,
            ddi: classify_ddi(&jac, MARGINAL_TOL),
            touch_value: touch_inequality(&jac).ok(),
        })
    }
}

/// Kinetic classification from trace and determinant: stable iff
/// `trace < 0 < det`, unstable iff `trace > 0` or `det < 0`, marginal when
/// either magnitude sits inside the tolerance band.
pub fn classify_kinetic(trace: f64, det: f64, tol: f64) -> KineticClass {
    if trace.abs() <= tol || det.abs() <= tol {
        KineticClass::Marginal
    } else if trace < 0.0 && det > 0.0 {
        KineticClass::Stable
    } else {
        KineticClass::Unstable
    }
}

/// Diffusion-driven instability test: `f_u > 0`, `trace < 0`, `det > 0`.
pub fn classify_ddi(jac: &Jacobian2, tol: f64) -> bool {
    jac.fu > tol && jac.trace() < -tol && jac.det() > tol
}

/// The touch quantity `det J / f_u`. A positive value is what a touched
/// constant state must carry at some touch point of a non-constant profile.
pub fn touch_inequality(jac: &Jacobian2) -> Result<f64> {
    if jac.fu.abs() <= MARGINAL_TOL {
        return Err(Error::Hypothesis("degenerate f_u = 0; touch value undefined".into()));
    }
    Ok(jac.det() / jac.fu)
}

/// Rectangle in the `(u, v)` plane to scan for constant states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBox {
    pub u: (f64, f64),
    pub v: (f64, f64),
}

impl SearchBox {
    pub fn new(u: (f64, f64), v: (f64, f64)) -> Result<Self> {
        if !(u.0 < u.1) || !(v.0 < v.1) {
            return Err(Error::Parameter("search box must have positive extent".into()));
        }
        Ok(Self { u, v })
    }
}

/// Result of a constant-state scan.
#[derive(Debug, Clone)]
pub struct SteadyScan {
    pub states: Vec<ConstantState>,
    /// Newton starts that did not converge (diagnostic, not an error).
    pub failed_starts: usize,
}

/// Find all roots of `(f, g) = (0, 0)` inside the box.
///
/// A coarse corner grid flags cells where both residual components change
/// sign (or vanish); damped Newton runs from each flagged cell center, roots
/// are deduplicated within [`DEDUP_RADIUS`] and sorted by `(u, v)`. An empty
/// list is a valid outcome.
pub fn find_constant_states(
    model: &KineticModel,
    search_box: SearchBox,
    grid: (usize, usize),
) -> Result<SteadyScan> {
    let (nu, nv) = (grid.0.max(2), grid.1.max(2));
    let du = (search_box.u.1 - search_box.u.0) / nu as f64;
    let dv = (search_box.v.1 - search_box.v.0) / nv as f64;
    let corner = |i: usize, j: usize| -> (f64, f64) {
        (search_box.u.0 + i as f64 * du, search_box.v.0 + j as f64 * dv)
    };

    // residuals at the corner lattice; inadmissible corners are masked out
    let mut fvals = alloc::vec![f64::NAN; (nu + 1) * (nv + 1)];
    let mut gvals = alloc::vec![f64::NAN; (nu + 1) * (nv + 1)];
    for i in 0..=nu {
        for j in 0..=nv {
            let (u, v) = corner(i, j);
            if let (Ok(f), Ok(g)) = (model.f(u, v), model.g(u, v)) {
                fvals[i * (nv + 1) + j] = f;
                gvals[i * (nv + 1) + j] = g;
            }
        }
    }

    let mut roots: Vec<(f64, f64)> = Vec::new();
    let mut failed = 0usize;
    for i in 0..nu {
        for j in 0..nv {
            let idx = [i * (nv + 1) + j, (i + 1) * (nv + 1) + j, i * (nv + 1) + j + 1, (i + 1) * (nv + 1) + j + 1];
            if idx.iter().any(|&k| fvals[k].is_nan()) {
                continue;
            }
            let spans_zero = |vals: &[f64]| {
                let lo = idx.iter().map(|&k| vals[k]).fold(f64::INFINITY, f64::min);
                let hi = idx.iter().map(|&k| vals[k]).fold(f64::NEG_INFINITY, f64::max);
                lo <= 0.0 && hi >= 0.0
            };
            if !(spans_zero(&fvals) && spans_zero(&gvals)) {
                continue;
            }
            let (u0, v0) = (search_box.u.0 + (i as f64 + 0.5) * du, search_box.v.0 + (j as f64 + 0.5) * dv);
            match newton_2d(
                |u, v| Ok((model.f(u, v)?, model.g(u, v)?)),
                |u, v| {
                    let j = model.jacobian(u, v)?;
                    Ok([j.fu, j.fv, j.gu, j.gv])
                },
                u0,
                v0,
                ROOT_TOL,
                80,
            ) {
                Ok((u, v)) => {
                    let pad_u = 1e-9 * (1.0 + du.abs());
                    let pad_v = 1e-9 * (1.0 + dv.abs());
                    let inside = u >= search_box.u.0 - pad_u && u <= search_box.u.1 + pad_u
                        && v >= search_box.v.0 - pad_v
                        && v <= search_box.v.1 + pad_v;
                    if inside && !roots.iter().any(|r| (r.0 - u).abs().max((r.1 - v).abs()) < DEDUP_RADIUS)
                    {
                        roots.push((u, v));
                    }
                }
                Err(_) => failed += 1,
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let states = roots
        .into_iter()
        .map(|(u, v)| ConstantState::from_point(model, u, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(SteadyScan { states, failed_starts: failed })
}

/// Closed-form equilibria of the carcinogenesis kinetic system and the
/// stability verdicts of its two positive states.
#[derive(Debug, Clone)]
pub struct CarcinogenesisEquilibria {
    /// Existence threshold `Θ = 4 d_g (d_c/(a-d_c))² d_b (d_b+d)`.
    pub theta: f64,
    /// `κ0² > Θ`: two positive states exist.
    pub exists: bool,
    pub u_minus: f64,
    pub w_minus: f64,
    pub u_plus: f64,
    pub w_plus: f64,
    /// `β = γ/(γ - d_g)` with `γ = (d_c/a)(a - d_c)`, defined when `γ > d_g`.
    pub beta: Option<f64>,
    /// `(u₊, w₊)` verdict; always unstable when it exists.
    pub plus_unstable: bool,
    /// `(u₋, w₋)` verdict from the three-condition exception region.
    pub minus_stable: bool,
}

/// Evaluate the closed forms. Requires `a > d_c` and positive rates.
pub fn carcinogenesis_equilibria(rates: &CarcinogenesisRates) -> Result<CarcinogenesisEquilibria> {
    if !(rates.a > rates.dc) {
        return Err(Error::Parameter(alloc::format!(
            "carcinogenesis equilibria need a > dc, got a = {}, dc = {}",
            rates.a,
            rates.dc
        )));
    }
    let ratio = rates.dc / (rates.a - rates.dc);
    let s = rates.s();
    let theta = 4.0 * rates.dg * ratio * ratio * rates.db * s;
    let exists = rates.kappa0 * rates.kappa0 > theta;
    let gamma = rates.dc / rates.a * (rates.a - rates.dc);
    let beta = if gamma > rates.dg { Some(gamma / (gamma - rates.dg)) } else { None };

    if !exists {
        return Ok(CarcinogenesisEquilibria {
            theta,
            exists,
            u_minus: f64::NAN,
            w_minus: f64::NAN,
            u_plus: f64::NAN,
            w_plus: f64::NAN,
            beta,
            plus_unstable: false,
            minus_stable: false,
        });
    }

    let root = (rates.kappa0 * rates.kappa0 - theta).sqrt();
    let w_minus = (rates.kappa0 - root) / (2.0 * rates.dg);
    let w_plus = (rates.kappa0 + root) / (2.0 * rates.dg);
    let u_minus = ratio * s / w_minus;
    let u_plus = ratio * s / w_plus;

    // (u₋, w₋) is stable except on the region
    //   γ - d_g > 0,  β/2 <= 1,  κ0² <= β²Θ/(4(β-1))
    let minus_unstable = match beta {
        Some(beta) => {
            beta / 2.0 <= 1.0
                && rates.kappa0 * rates.kappa0 <= beta * beta * theta / (4.0 * (beta - 1.0))
        }
        None => false,
    };

    Ok(CarcinogenesisEquilibria {
        theta,
        exists,
        u_minus,
        w_minus,
        u_plus,
        w_plus,
        beta,
        plus_unstable: true,
        minus_stable: !minus_unstable,
    })
}

/// Compact text summary for a scanned state (used by the CLI report).
pub fn describe_state(state: &ConstantState) -> String {
    alloc::format!(
        "({:.6}, {:.6}) {} ddi={} touch={}",
        state.u,
        state.v,
        state.kinetic_class.as_str(),
        state.ddi,
        match state.touch_value {
            Some(t) => alloc::format!("{t:.6}"),
            None => String::from("n/a"),
        }
    )
}
