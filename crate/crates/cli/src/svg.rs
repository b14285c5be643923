//! Minimal SVG line/scatter rendering, written directly (no plotting
//! dependency). Enough for profile curves, spectrum scatter plots with the
//! essential interval and gap strip, and log-log convergence plots.

use std::fmt::Write as _;
use std::path::Path;

use crate::CliResult;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 54.0;

pub struct Plot {
    title: String,
    x_label: String,
    y_label: String,
    x_range: (f64, f64),
    y_range: (f64, f64),
    body: String,
    legend: Vec<(String, &'static str)>,
}

fn nice_range(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.06 * (hi - lo);
    (lo - pad, hi + pad)
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str, x: (f64, f64), y: (f64, f64)) -> Self {
        Self {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            x_range: nice_range(x.0, x.1),
            y_range: nice_range(y.0, y.1),
            body: String::new(),
            legend: Vec::new(),
        }
    }

    pub fn from_series(title: &str, x_label: &str, y_label: &str, series: &[&[(f64, f64)]]) -> Self {
        let mut xlo = f64::INFINITY;
        let mut xhi = f64::NEG_INFINITY;
        let mut ylo = f64::INFINITY;
        let mut yhi = f64::NEG_INFINITY;
        for s in series {
            for (x, y) in s.iter() {
                xlo = xlo.min(*x);
                xhi = xhi.max(*x);
                ylo = ylo.min(*y);
                yhi = yhi.max(*y);
            }
        }
        Self::new(title, x_label, y_label, (xlo, xhi), (ylo, yhi))
    }

    fn sx(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_range.0) / (self.x_range.1 - self.x_range.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT - MARGIN
            - (y - self.y_range.0) / (self.y_range.1 - self.y_range.0) * (HEIGHT - 2.0 * MARGIN)
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], color: &'static str, label: &str) {
        if points.is_empty() {
            return;
        }
        let mut coords = String::new();
        for (x, y) in points {
            let _ = write!(coords, "{:.2},{:.2} ", self.sx(*x), self.sy(*y));
        }
        let _ = writeln!(
            self.body,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.4\"/>",
            coords.trim_end()
        );
        if !label.is_empty() {
            self.legend.push((label.to_string(), color));
        }
    }

    pub fn scatter(&mut self, points: &[(f64, f64)], color: &'static str, label: &str) {
        for (x, y) in points {
            let _ = writeln!(
                self.body,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.4\" fill=\"{color}\"/>",
                self.sx(*x),
                self.sy(*y)
            );
        }
        if !label.is_empty() {
            self.legend.push((label.to_string(), color));
        }
    }

    /// Vertical band `x in [x0, x1]` over the full plot height.
    pub fn vertical_band(&mut self, x0: f64, x1: f64, color: &'static str, label: &str) {
        let (a, b) = (self.sx(x0), self.sx(x1));
        let _ = writeln!(
            self.body,
            "<rect x=\"{:.2}\" y=\"{MARGIN}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{color}\" fill-opacity=\"0.25\"/>",
            a,
            (b - a).max(0.5),
            HEIGHT - 2.0 * MARGIN
        );
        if !label.is_empty() {
            self.legend.push((label.to_string(), color));
        }
    }

    /// Thick segment on the horizontal axis line `y`.
    pub fn segment(&mut self, x0: f64, x1: f64, y: f64, color: &'static str, label: &str) {
        let _ = writeln!(
            self.body,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{color}\" stroke-width=\"4\"/>",
            self.sx(x0),
            self.sy(y),
            self.sx(x1),
            self.sy(y)
        );
        if !label.is_empty() {
            self.legend.push((label.to_string(), color));
        }
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
        );
        let _ = writeln!(out, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
        // axes
        let _ = writeln!(
            out,
            "<line x1=\"{M}\" y1=\"{B}\" x2=\"{R}\" y2=\"{B}\" stroke=\"black\"/>",
            M = MARGIN,
            B = HEIGHT - MARGIN,
            R = WIDTH - MARGIN
        );
        let _ = writeln!(
            out,
            "<line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{B}\" stroke=\"black\"/>",
            M = MARGIN,
            B = HEIGHT - MARGIN
        );
        // tick labels at the range ends
        let _ = writeln!(
            out,
            "<text x=\"{M}\" y=\"{y}\" font-size=\"11\" text-anchor=\"middle\">{v:.4}</text>",
            M = MARGIN,
            y = HEIGHT - MARGIN + 16.0,
            v = self.x_range.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{x}\" y=\"{y}\" font-size=\"11\" text-anchor=\"middle\">{v:.4}</text>",
            x = WIDTH - MARGIN,
            y = HEIGHT - MARGIN + 16.0,
            v = self.x_range.1
        );
        let _ = writeln!(
            out,
            "<text x=\"{x}\" y=\"{y}\" font-size=\"11\" text-anchor=\"end\">{v:.4}</text>",
            x = MARGIN - 4.0,
            y = HEIGHT - MARGIN,
            v = self.y_range.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{x}\" y=\"{y}\" font-size=\"11\" text-anchor=\"end\">{v:.4}</text>",
            x = MARGIN - 4.0,
            y = MARGIN + 4.0,
            v = self.y_range.1
        );
        let _ = writeln!(
            out,
            "<text x=\"{x}\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">{t}</text>",
            x = WIDTH / 2.0,
            t = xml_escape(&self.title)
        );
        let _ = writeln!(
            out,
            "<text x=\"{x}\" y=\"{y}\" font-size=\"12\" text-anchor=\"middle\">{t}</text>",
            x = WIDTH / 2.0,
            y = HEIGHT - 12.0,
            t = xml_escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            "<text x=\"16\" y=\"{y}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {y})\">{t}</text>",
            y = HEIGHT / 2.0,
            t = xml_escape(&self.y_label)
        );
        out.push_str(&self.body);
        for (i, (label, color)) in self.legend.iter().enumerate() {
            let y = MARGIN + 14.0 * i as f64 + 4.0;
            let _ = writeln!(
                out,
                "<rect x=\"{x}\" y=\"{ry}\" width=\"10\" height=\"10\" fill=\"{color}\"/><text x=\"{tx}\" y=\"{ty}\" font-size=\"11\">{t}</text>",
                x = WIDTH - MARGIN - 130.0,
                ry = y - 9.0,
                tx = WIDTH - MARGIN - 116.0,
                ty = y,
                t = xml_escape(label)
            );
        }
        let _ = writeln!(out, "</svg>");
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_formed_output() {
        let mut plot = Plot::new("demo", "x", "y", (0.0, 1.0), (-1.0, 1.0));
        plot.polyline(&[(0.0, -1.0), (0.5, 0.0), (1.0, 1.0)], "#1f77b4", "line");
        plot.scatter(&[(0.25, 0.5)], "#d62728", "dot");
        plot.vertical_band(0.1, 0.2, "#2ca02c", "band");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("demo.svg");
        plot.write(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.trim_end().ends_with("</svg>"));
        // crude balance check on the one nested element type we emit
        assert_eq!(text.matches("<svg").count(), text.matches("</svg>").count());
        assert!(text.contains("<polyline"));
        assert!(text.contains("<circle"));
        assert!(text.contains("<rect"));
    }
}
