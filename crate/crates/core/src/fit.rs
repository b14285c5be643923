//! Least-squares fits used by the experiments: straight lines, goodness of
//! fit, automatic linear-window detection and log-log slopes.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// `y ~= slope * x + intercept` with the coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Shape("line fit needs >= 2 matching points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    if sxx == 0.0 {
        return Err(Error::Shape("degenerate abscissae in line fit".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(LineFit { slope, intercept: my - slope * mx, r2 })
}

/// Interval regression machinery over prefix sums, O(1) per window.
struct Prefix {
    sx: Vec<f64>,
    sy: Vec<f64>,
    sxx: Vec<f64>,
    sxy: Vec<f64>,
    syy: Vec<f64>,
}

impl Prefix {
    fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        let mut p = Prefix {
            sx: vec![0.0; n + 1],
            sy: vec![0.0; n + 1],
            sxx: vec![0.0; n + 1],
            sxy: vec![0.0; n + 1],
            syy: vec![0.0; n + 1],
        };
        for i in 0..n {
            p.sx[i + 1] = p.sx[i] + x[i];
            p.sy[i + 1] = p.sy[i] + y[i];
            p.sxx[i + 1] = p.sxx[i] + x[i] * x[i];
            p.sxy[i + 1] = p.sxy[i] + x[i] * y[i];
            p.syy[i + 1] = p.syy[i] + y[i] * y[i];
        }
        p
    }

    /// Fit on `[i, j)`.
    fn fit(&self, i: usize, j: usize) -> Option<LineFit> {
        let n = (j - i) as f64;
        let sx = self.sx[j] - self.sx[i];
        let sy = self.sy[j] - self.sy[i];
        let sxx = self.sxx[j] - self.sxx[i] - sx * sx / n;
        let sxy = self.sxy[j] - self.sxy[i] - sx * sy / n;
        let syy = self.syy[j] - self.syy[i] - sy * sy / n;
        if sxx <= 0.0 {
            return None;
        }
        let slope = sxy / sxx;
        let r2 = if syy <= 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).min(1.0) };
        Some(LineFit { slope, intercept: sy / n - slope * sx / n, r2 })
    }
}

/// Longest index window `[i, j)` on which a line fits `y` with `r2 >=
/// r2_min`, requiring at least `min_len` points. Ties go to the later
/// window, where an exponential tail has shed its transient.
pub fn longest_linear_window(
    x: &[f64],
    y: &[f64],
    r2_min: f64,
    min_len: usize,
) -> Option<(usize, usize, LineFit)> {
    let n = x.len();
    if n < min_len || min_len < 2 || y.len() != n {
        return None;
    }
    let prefix = Prefix::new(x, y);
    let mut best: Option<(usize, usize, LineFit)> = None;
    for i in 0..=(n - min_len) {
        // widest acceptable window starting at i; r2 of a growing window is
        // not monotone, so walk j down from the end
        let mut j = n;
        while j >= i + min_len {
            if let Some(f) = prefix.fit(i, j) {
                if f.r2 >= r2_min {
                    break;
                }
            }
            j -= 1;
        }
        if j < i + min_len {
            continue;
        }
        let f = prefix.fit(i, j).unwrap();
        let better = match &best {
            None => true,
            Some((bi, bj, _)) => (j - i) > (bj - bi) || ((j - i) == (bj - bi) && i >= *bi),
        };
        if better {
            best = Some((i, j, f));
        }
    }
    best
}

/// Slope of `log(y)` against `log(x)`; all entries must be positive.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("log-log fit needs positive data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly)
}
