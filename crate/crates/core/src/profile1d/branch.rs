//! Solution branches `U = k(V)` of `f(U, V) = 0` and the reduced scalar
//! reaction `h(V) = g(k(V), V) / D` driving the stationary Neumann problem
//! `ΔV + h(V) = 0`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::kinetics::KineticModel;
use crate::roots::newton_scalar;

/// `f_u` magnitudes below this end a continuation (fold).
const FOLD_TOL: f64 = 1e-8;
/// Tabulation nodes per branch.
const TABLE_NODES: usize = 2001;

/// A tabulated branch `V -> U = k(V)` with monotone-cubic interpolation.
///
/// Evaluation polishes the interpolated value by a Newton step on
/// `u -> f(u, V)`, so `|f(k(V), V)|` stays at solver precision between
/// nodes. The derivative comes from the implicit-function identity
/// `k' = -f_v / f_u`.
#[derive(Debug, Clone)]
pub struct Branch {
    label: String,
    table: MonotoneCubic,
    v_lo: f64,
    v_hi: f64,
    /// Location where `f_u -> 0` stopped the continuation, if any.
    fold: Option<f64>,
}

impl Branch {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn v_interval(&self) -> (f64, f64) {
        (self.v_lo, self.v_hi)
    }

    pub fn fold(&self) -> Option<f64> {
        self.fold
    }

    fn check_domain(&self, v: f64) -> Result<()> {
        let pad = 1e-12 * (1.0 + self.v_hi.abs());
        if v < self.v_lo - pad || v > self.v_hi + pad {
            return Err(Error::Domain(alloc::format!(
                "V = {v} outside branch interval [{}, {}]",
                self.v_lo,
                self.v_hi
            )));
        }
        Ok(())
    }

    /// `k(V)`: interpolate, then polish on `f(·, V) = 0`.
    pub fn u_at(&self, model: &KineticModel, v: f64) -> Result<f64> {
        self.check_domain(v)?;
        let guess = self.table.eval(v);
        let scale = 1.0 + guess.abs();
        match newton_scalar(
            |u| model.f(u, v),
            |u| Ok(model.jacobian(u, v)?.fu),
            guess,
            1e-14 * scale,
            8,
        ) {
            // a polish that wanders off has left the branch; keep the table
            Ok(u) if (u - guess).abs() <= 0.05 * scale => Ok(u),
            _ => Ok(guess),
        }
    }

    /// `k'(V) = -f_v/f_u` at `(k(V), V)`.
    pub fn du_dv(&self, model: &KineticModel, v: f64) -> Result<f64> {
        let u = self.u_at(model, v)?;
        let jac = model.jacobian(u, v)?;
        if jac.fu.abs() <= FOLD_TOL {
            return Err(Error::Hypothesis(alloc::format!("branch fold at V = {v} (f_u = 0)")));
        }
        Ok(-jac.fv / jac.fu)
    }
}

/// Tabulate a branch over `v_interval` by Newton continuation from
/// `(seed_u, midpoint)`.
///
/// If `f_u` degenerates along the way the branch is truncated there and the
/// fold location recorded; an error is returned only when no usable piece
/// exists.
pub fn solve_branch(
    model: &KineticModel,
    v_interval: (f64, f64),
    seed_u: f64,
    label: &str,
) -> Result<Branch> {
    let (v_lo, v_hi) = v_interval;
    if !(v_lo < v_hi) {
        return Err(Error::Parameter("branch interval must have positive length".into()));
    }
    let n = TABLE_NODES;
    let dv = (v_hi - v_lo) / (n - 1) as f64;
    let v_node = |i: usize| v_lo + i as f64 * dv;
    let mid = n / 2;

    let mut us = alloc::vec![f64::NAN; n];
    let mut fold: Option<f64> = None;
    let solve_at = |v: f64, guess: f64| -> Result<f64> {
        let u = newton_scalar(
            |u| model.f(u, v),
            |u| Ok(model.jacobian(u, v)?.fu),
            guess,
            1e-13 * (1.0 + guess.abs()),
            60,
        )?;
        if model.jacobian(u, v)?.fu.abs() <= FOLD_TOL {
            return Err(Error::Hypothesis(alloc::format!("fold: f_u = 0 near V = {v}")));
        }
        Ok(u)
    };

    us[mid] = solve_at(v_node(mid), seed_u).map_err(|e| {
        Error::Convergence(alloc::format!("branch seed did not converge: {e}"))
    })?;
    let mut lo_idx = mid;
    let mut hi_idx = mid;
    for i in (0..mid).rev() {
        match solve_at(v_node(i), us[i + 1]) {
            Ok(u) => {
                us[i] = u;
                lo_idx = i;
            }
            Err(_) => {
                fold = Some(v_node(i));
                break;
            }
        }
    }
    for i in mid + 1..n {
        match solve_at(v_node(i), us[i - 1]) {
            Ok(u) => {
                us[i] = u;
                hi_idx = i;
            }
            Err(_) => {
                fold = Some(v_node(i));
                break;
            }
        }
    }
    if hi_idx - lo_idx < 8 {
        return Err(Error::Convergence(alloc::format!(
            "branch collapsed to {} nodes around the seed",
            hi_idx - lo_idx + 1
        )));
    }
    let xs: Vec<f64> = (lo_idx..=hi_idx).map(v_node).collect();
    let ys: Vec<f64> = us[lo_idx..=hi_idx].to_vec();
    Ok(Branch {
        label: String::from(label),
        table: MonotoneCubic::new(xs, ys)?,
        v_lo: v_node(lo_idx),
        v_hi: v_node(hi_idx),
        fold,
    })
}

/// The reduced scalar reaction `h(V) = g(k(V), V) / D` and its derivative
/// `h'(V) = (-(f_v/f_u) g_u + g_v) / D`, the potential of the stationary
/// problem `ΔV + h(V) = 0` on the branch.
#[derive(Debug, Clone, Copy)]
pub struct ReducedH<'a> {
    model: &'a KineticModel,
    branch: &'a Branch,
}

/// Pair a branch with its model to evaluate the reduced reaction.
pub fn reduced_h<'a>(model: &'a KineticModel, branch: &'a Branch) -> ReducedH<'a> {
    ReducedH { model, branch }
}

impl ReducedH<'_> {
    pub fn domain(&self) -> (f64, f64) {
        self.branch.v_interval()
    }

    pub fn branch(&self) -> &Branch {
        self.branch
    }

    pub fn model(&self) -> &KineticModel {
        self.model
    }

    pub fn h(&self, v: f64) -> Result<f64> {
        let u = self.branch.u_at(self.model, v)?;
        Ok(self.model.g(u, v)? / self.model.diffusion())
    }

    pub fn h_prime(&self, v: f64) -> Result<f64> {
        let u = self.branch.u_at(self.model, v)?;
        let jac = self.model.jacobian(u, v)?;
        if jac.fu.abs() <= FOLD_TOL {
            return Err(Error::Hypothesis(alloc::format!("h' undefined at fold V = {v}")));
        }
        Ok((-(jac.fv / jac.fu) * jac.gu + jac.gv) / self.model.diffusion())
    }

    /// Roots of `h` in `[lo, hi]` with their `h'` values, by scan and
    /// bisection. These are the constant states a profile can touch.
    pub fn roots(&self, lo: f64, hi: f64) -> Result<Vec<(f64, f64)>> {
        let (blo, bhi) = self.branch.v_interval();
        let lo = lo.max(blo);
        let hi = hi.min(bhi);
        if !(lo < hi) {
            return Ok(Vec::new());
        }
        let scan = 512;
        let mut roots: Vec<(f64, f64)> = Vec::new();
        let mut prev_v = lo;
        let mut prev_h = self.h(lo)?;
        for i in 1..=scan {
            let v = lo + (hi - lo) * i as f64 / scan as f64;
            let hv = self.h(v)?;
            if prev_h == 0.0 || prev_h * hv < 0.0 {
                let root = crate::roots::bisect(|x| self.h(x), prev_v, v, 1e-13 * (1.0 + hi))?;
                if !roots.iter().any(|(r, _)| (r - root).abs() < 1e-9 * (1.0 + hi)) {
                    roots.push((root, self.h_prime(root)?));
                }
            }
            prev_v = v;
            prev_h = hv;
        }
        Ok(roots)
    }
}
