//! Adaptive Dormand-Prince 5(4) integration for two-component initial value
//! problems, with cubic-Hermite dense output.
//!
//! The shooting solver drives this on the phase-plane system
//! `(V, V')' = (V', -h(V))`.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Accepted steps of an IVP solve; values and derivatives at the knots give a
/// third-order interpolant between them.
#[derive(Debug, Clone)]
pub struct Trajectory {
    xs: Vec<f64>,
    ys: Vec<[f64; 2]>,
    dys: Vec<[f64; 2]>,
}

impl Trajectory {
    pub fn end(&self) -> (f64, [f64; 2]) {
        (*self.xs.last().unwrap(), *self.ys.last().unwrap())
    }

    /// Hermite interpolation at `x` (clamped to the covered range).
    pub fn sample(&self, x: f64) -> [f64; 2] {
        let n = self.xs.len();
        let x = x.max(self.xs[0]).min(self.xs[n - 1]);
        let seg = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        let h = self.xs[seg + 1] - self.xs[seg];
        let t = (x - self.xs[seg]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let mut out = [0.0; 2];
        for c in 0..2 {
            out[c] = h00 * self.ys[seg][c]
                + h10 * h * self.dys[seg][c]
                + h01 * self.ys[seg + 1][c]
                + h11 * h * self.dys[seg + 1][c];
        }
        out
    }
}

/// Result of an adaptive solve: either the full trajectory or the location
/// where the solution left the admissible region / blew up.
#[derive(Debug, Clone)]
pub enum IvpOutcome {
    Complete(Trajectory),
    /// Integration stopped early; `x` is how far it got.
    Failed { x: f64 },
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Integrate `y' = rhs(x, y)` from `x0` to `x_end`.
///
/// A right-hand-side error or `|y| > value_cap` stops the solve and yields
/// [`IvpOutcome::Failed`]. Tolerance failures below the minimal step are
/// treated the same way.
pub fn integrate<F>(
    rhs: F,
    x0: f64,
    y0: [f64; 2],
    x_end: f64,
    rtol: f64,
    atol: f64,
    value_cap: f64,
) -> Result<IvpOutcome>
where
    F: Fn(f64, [f64; 2]) -> Result<[f64; 2]>,
{
    if !(x_end > x0) {
        return Err(Error::Parameter("IVP needs x_end > x0".into()));
    }
    let span = x_end - x0;
    let mut x = x0;
    let mut y = y0;
    let mut dy = match rhs(x, y) {
        Ok(d) => d,
        Err(_) => return Ok(IvpOutcome::Failed { x }),
    };
    let mut h = (span / 100.0).min(1e-2 * span.max(1.0));
    let h_min = span * 1e-14;

    let mut xs = alloc::vec![x];
    let mut ys = alloc::vec![y];
    let mut dys = alloc::vec![dy];

    let mut k = [[0.0f64; 2]; 7];
    for _ in 0..1_000_000 {
        if x >= x_end {
            return Ok(IvpOutcome::Complete(Trajectory { xs, ys, dys }));
        }
        h = h.min(x_end - x);
        k[0] = dy;
        let mut failed_eval = false;
        for s in 0..6 {
            let mut ystage = y;
            for (j, kj) in k.iter().enumerate().take(s + 1) {
                ystage[0] += h * A[s][j] * kj[0];
                ystage[1] += h * A[s][j] * kj[1];
            }
            match rhs(x + C[s] * h, ystage) {
                Ok(d) if d[0].is_finite() && d[1].is_finite() => k[s + 1] = d,
                _ => {
                    failed_eval = true;
                    break;
                }
            }
        }
        if failed_eval {
            h *= 0.5;
            if h < h_min {
                return Ok(IvpOutcome::Failed { x });
            }
            continue;
        }
        let mut ynew = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            ynew[0] += h * A[5][j] * kj[0];
            ynew[1] += h * A[5][j] * kj[1];
        }
        let mut err: f64 = 0.0;
        for c in 0..2 {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[c];
            }
            e *= h;
            let scale = atol + rtol * y[c].abs().max(ynew[c].abs());
            err = err.max((e / scale).abs());
        }
        if err <= 1.0 {
            x += h;
            y = ynew;
            dy = k[6]; // FSAL
            xs.push(x);
            ys.push(y);
            dys.push(dy);
            if y[0].abs() > value_cap || y[1].abs() > value_cap {
                return Ok(IvpOutcome::Failed { x });
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < h_min {
            return Ok(IvpOutcome::Failed { x });
        }
    }
    Err(Error::Convergence("IVP exceeded the step budget".into()))
}
