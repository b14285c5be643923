//! Scalar and 2-D root finding: bisection and damped Newton.


use crate::error::{Error, Result};

/// Bisect a sign change of `f` on `[lo, hi]` down to absolute width `tol`.
///
/// The endpoints must already bracket a root (`f(lo) * f(hi) <= 0`).
pub fn bisect<F: FnMut(f64) -> Result<f64>>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo * fhi > 0.0 {
        return Err(Error::Bracket(alloc::format!(
            "no sign change on [{lo}, {hi}] ({flo} .. {fhi})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol {
            return Ok(mid);
        }
        let fmid = f(mid)?;
        if fmid == 0.0 {
            return Ok(mid);
        }
        if flo * fmid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Newton iteration for a scalar equation with step damping; falls back to
/// halving the step until the residual decreases.
pub fn newton_scalar<F, D>(mut f: F, mut df: D, x0: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
    D: FnMut(f64) -> Result<f64>,
{
    let mut x = x0;
    let mut fx = f(x)?;
    for _ in 0..max_iter {
        if fx.abs() <= tol {
            return Ok(x);
        }
        let d = df(x)?;
        if d == 0.0 || !d.is_finite() {
            return Err(Error::Convergence("vanishing derivative in Newton".into()));
        }
        let mut step = fx / d;
        let mut accepted = false;
        for _ in 0..40 {
            let xn = x - step;
            match f(xn) {
                Ok(fn_) if fn_.is_finite() && fn_.abs() < fx.abs() => {
                    x = xn;
                    fx = fn_;
                    accepted = true;
                    break;
                }
                _ => step *= 0.5,
            }
        }
        if !accepted {
            return Err(Error::Convergence("Newton line search stalled".into()));
        }
    }
    if fx.abs() <= tol {
        Ok(x)
    } else {
        Err(Error::Convergence(alloc::format!(
            "Newton did not reach tolerance, residual {fx}"
        )))
    }
}

/// Damped Newton for a 2-D system `F(x, y) = 0` with user Jacobian.
///
/// Returns `(x, y)` with residual max-norm below `tol`.
pub fn newton_2d<F, J>(
    mut f: F,
    mut jac: J,
    mut x: f64,
    mut y: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, f64)>
where
    F: FnMut(f64, f64) -> Result<(f64, f64)>,
    J: FnMut(f64, f64) -> Result<[f64; 4]>,
{
    let norm = |p: (f64, f64)| p.0.abs().max(p.1.abs());
    let mut fv = f(x, y)?;
    for _ in 0..max_iter {
        if norm(fv) <= tol {
            return Ok((x, y));
        }
        let [a, b, c, d] = jac(x, y)?;
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Convergence("singular Jacobian in Newton".into()));
        }
        let dx = (d * fv.0 - b * fv.1) / det;
        let dy = (-c * fv.0 + a * fv.1) / det;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let (xn, yn) = (x - lambda * dx, y - lambda * dy);
            match f(xn, yn) {
                Ok(fn_) if fn_.0.is_finite() && fn_.1.is_finite() && norm(fn_) < norm(fv) => {
                    x = xn;
                    y = yn;
                    fv = fn_;
                    accepted = true;
                    break;
                }
                _ => lambda *= 0.5,
            }
        }
        if !accepted {
            return Err(Error::Convergence("Newton line search stalled".into()));
        }
    }
    if norm(fv) <= tol {
        Ok((x, y))
    } else {
        Err(Error::Convergence(alloc::format!(
            "2-D Newton stalled at residual {}",
            norm(fv)
        )))
    }
}
