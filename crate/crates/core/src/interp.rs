//! Monotone cubic interpolation (Fritsch-Carlson).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Piecewise-cubic Hermite interpolant with Fritsch-Carlson slope limiting,
/// so monotone data yields a monotone interpolant.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubic {
    /// Build from strictly increasing abscissae.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::Shape("interpolation needs >= 2 matching nodes".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Shape("interpolation nodes must increase strictly".into()));
        }
        let n = x.len();
        let mut delta = vec![0.0; n - 1];
        for i in 0..n - 1 {
            delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        }
        let mut slope = vec![0.0; n];
        slope[0] = delta[0];
        slope[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            slope[i] = if delta[i - 1] * delta[i] <= 0.0 {
                0.0
            } else {
                // harmonic mean weighted by interval widths
                let w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
                let w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
                (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i])
            };
        }
        // Fritsch-Carlson limiter on the end slopes
        for (i, d) in [(0usize, delta[0]), (n - 1, delta[n - 2])] {
            if d == 0.0 {
                slope[i] = 0.0;
            } else if slope[i] / d > 3.0 {
                slope[i] = 3.0 * d;
            } else if slope[i] / d < 0.0 {
                slope[i] = 0.0;
            }
        }
        Ok(Self { x, y, slope })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn segment(&self, xq: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&xq).unwrap()) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    /// Evaluate; clamps to the tabulated interval.
    pub fn eval(&self, xq: f64) -> f64 {
        let (a, b) = self.domain();
        let xq = xq.max(a).min(b);
        let i = self.segment(xq);
        let h = self.x[i + 1] - self.x[i];
        let t = (xq - self.x[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i] + h10 * h * self.slope[i] + h01 * self.y[i + 1] + h11 * h * self.slope[i + 1]
    }
}
