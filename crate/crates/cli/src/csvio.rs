//! CSV emission and loading.
//!
//! Format contract: comma separator, one header row, `.` decimal point, LF
//! line endings. Floats print in Rust's shortest round-trip form, so a
//! rerun with the same seed is byte-identical and every file reloads
//! losslessly. Summary blocks ride as `# key,value` footer lines that the
//! loaders skip.

use std::fmt::Write as _;
use std::path::Path;

use crate::{as_config, CliError, CliResult};
use rdode_core::evolve::{EvolutionTrace, ReductionReport, State2};
use rdode_core::grid::Grid;
use rdode_core::kinetics::KineticModel;
use rdode_core::profile1d::StationaryProfile;
use rdode_core::spectrum::SpectrumReport;
use rdode_core::steady::{ConstantState, KineticClass};

fn write_file(path: &Path, content: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, content)?;
    Ok(())
}

/// `ubar,vbar,fu,fv,gu,gv,trace,det,kinetic_class,ddi,touch_value`
pub fn write_states(path: &Path, states: &[ConstantState]) -> CliResult<()> {
    let mut out = String::from("ubar,vbar,fu,fv,gu,gv,trace,det,kinetic_class,ddi,touch_value\n");
    for s in states {
        let touch = match s.touch_value {
            Some(t) => format!("{t}"),
            None => "n/a".to_string(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            s.u,
            s.v,
            s.jac.fu,
            s.jac.fv,
            s.jac.gu,
            s.jac.gv,
            s.trace,
            s.det,
            s.kinetic_class.as_str(),
            s.ddi,
            touch
        );
    }
    write_file(path, &out)
}

pub struct LoadedState {
    pub u: f64,
    pub v: f64,
    pub kinetic_class: KineticClass,
    pub ddi: bool,
    pub touch_value: Option<f64>,
}

pub fn read_states(path: &Path) -> CliResult<Vec<LoadedState>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.starts_with('#') || line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 11 {
            return Err(CliError::Config(format!("bad states row: '{line}'")));
        }
        rows.push(LoadedState {
            u: parse_f64(cols[0])?,
            v: parse_f64(cols[1])?,
            kinetic_class: match cols[8] {
                "stable" => KineticClass::Stable,
                "unstable" => KineticClass::Unstable,
                "marginal" => KineticClass::Marginal,
                other => return Err(CliError::Config(format!("bad kinetic class '{other}'"))),
            },
            ddi: cols[9] == "true",
            touch_value: if cols[10] == "n/a" { None } else { Some(parse_f64(cols[10])?) },
        });
    }
    Ok(rows)
}

/// `x,U,V,branch,f_u,f_v,g_u,g_v`
pub fn write_profile(path: &Path, profile: &StationaryProfile) -> CliResult<()> {
    let mut out = String::from("x,U,V,branch,f_u,f_v,g_u,g_v\n");
    for i in 0..profile.n() {
        let label = &profile.branch_names[profile.branch_cell[i] as usize];
        if label.contains(',') {
            return Err(CliError::Config(format!("branch label '{label}' contains a comma")));
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            profile.grid.x(i),
            profile.u[i],
            profile.v[i],
            label,
            profile.fu[i],
            profile.fv[i],
            profile.gu[i],
            profile.gv[i]
        );
    }
    write_file(path, &out)
}

/// Rebuild a profile for `model` from its CSV. The Jacobian columns are
/// recomputed from the model; the stored ones are checked for consistency.
pub fn read_profile(path: &Path, model: &KineticModel) -> CliResult<StationaryProfile> {
    let text = std::fs::read_to_string(path)?;
    let mut xs = Vec::new();
    let mut us = Vec::new();
    let mut vs = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut branch_cell = Vec::new();
    let mut stored_fu = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.starts_with('#') || line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 8 {
            return Err(CliError::Config(format!("bad profile row: '{line}'")));
        }
        xs.push(parse_f64(cols[0])?);
        us.push(parse_f64(cols[1])?);
        vs.push(parse_f64(cols[2])?);
        let label = cols[3].to_string();
        let idx = match labels.iter().position(|l| *l == label) {
            Some(idx) => idx,
            None => {
                labels.push(label);
                labels.len() - 1
            }
        };
        branch_cell.push(idx as u16);
        stored_fu.push(parse_f64(cols[4])?);
    }
    if xs.len() < 2 {
        return Err(CliError::Config(format!("{}: profile too short", path.display())));
    }
    // cell-centered grid: x_i = (i + 1/2) h
    let h = 2.0 * xs[0];
    let n = xs.len();
    let length = h * n as f64;
    let grid = Grid::new(n, length).map_err(as_config)?;
    for (i, x) in xs.iter().enumerate() {
        if (x - grid.x(i)).abs() > 1e-9 * (1.0 + length) {
            return Err(CliError::Config(format!(
                "{}: abscissae are not cell centers of a uniform grid",
                path.display()
            )));
        }
    }
    let profile = StationaryProfile::from_samples(model, grid, us, vs, branch_cell, labels)
        .map_err(as_config)?;
    for i in 0..n {
        if (profile.fu[i] - stored_fu[i]).abs() > 1e-6 * (1.0 + stored_fu[i].abs()) {
            return Err(CliError::Config(format!(
                "{}: stored f_u disagrees with the model at row {i} (wrong model/params?)",
                path.display()
            )));
        }
    }
    Ok(profile)
}

/// `re,im,method` rows plus a `#` summary footer.
pub fn write_spectrum(path: &Path, report: &SpectrumReport) -> CliResult<()> {
    let mut out = String::from("re,im,method\n");
    for z in &report.dense_eigenvalues {
        let _ = writeln!(out, "{},{},dense", z.re, z.im);
    }
    for (n, l) in &report.lambda_sequence {
        let _ = writeln!(out, "{},0,reduced:{n}", l);
    }
    let _ = writeln!(out, "# lambda0,{}", report.lambda0);
    let _ = writeln!(out, "# lambda_cap,{}", report.lambda_cap);
    match report.gap {
        Some((mu, m)) => {
            let _ = writeln!(out, "# gap_mu,{mu}");
            let _ = writeln!(out, "# gap_m,{m}");
        }
        None => {
            let _ = writeln!(out, "# gap_mu,n/a");
            let _ = writeln!(out, "# gap_m,n/a");
        }
    }
    let _ = writeln!(out, "# unstable,{}", report.unstable);
    if !report.missing_modes.is_empty() {
        let modes: Vec<String> = report.missing_modes.iter().map(|m| m.to_string()).collect();
        let _ = writeln!(out, "# missing_modes,{}", modes.join(";"));
    }
    write_file(path, &out)
}

pub struct LoadedSpectrum {
    pub eigenvalues: Vec<(f64, f64, String)>,
    pub lambda0: f64,
    pub lambda_cap: f64,
    pub gap: Option<(f64, f64)>,
    pub unstable: bool,
}

pub fn read_spectrum(path: &Path) -> CliResult<LoadedSpectrum> {
    let text = std::fs::read_to_string(path)?;
    let mut eigenvalues = Vec::new();
    let mut footer = std::collections::BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some((k, v)) = rest.split_once(',') {
                footer.insert(k.to_string(), v.to_string());
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(CliError::Config(format!("bad spectrum row: '{line}'")));
        }
        eigenvalues.push((parse_f64(cols[0])?, parse_f64(cols[1])?, cols[2].to_string()));
    }
    let get = |k: &str| -> CliResult<f64> {
        parse_f64(
            footer
                .get(k)
                .ok_or_else(|| CliError::Config(format!("missing footer key '{k}'")))?,
        )
    };
    let gap = match footer.get("gap_mu").map(String::as_str) {
        Some("n/a") | None => None,
        Some(_) => Some((get("gap_mu")?, get("gap_m")?)),
    };
    Ok(LoadedSpectrum {
        eigenvalues,
        lambda0: get("lambda0")?,
        lambda_cap: get("lambda_cap")?,
        gap,
        unstable: footer.get("unstable").map(|s| s == "true").unwrap_or(false),
    })
}

/// `t,sup_dev,l2_dev,sup_dev_u,sup_dev_v` plus fitted-rate footer.
pub fn write_trace(path: &Path, trace: &EvolutionTrace) -> CliResult<()> {
    let mut out = String::from("t,sup_dev,l2_dev,sup_dev_u,sup_dev_v\n");
    for i in 0..trace.times.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            trace.times[i],
            trace.sup_dev[i],
            trace.l2_dev[i],
            trace.sup_dev_u[i],
            trace.sup_dev_v[i]
        );
    }
    match &trace.rate_fit {
        Some(fit) => {
            let _ = writeln!(out, "# fitted_rate,{}", fit.rate);
            let _ = writeln!(out, "# fit_window,{};{}", fit.window.0, fit.window.1);
            let _ = writeln!(out, "# fit_r2,{}", fit.r2);
        }
        None => {
            let _ = writeln!(out, "# fitted_rate,n/a");
        }
    }
    match trace.predicted_rate {
        Some(rate) => {
            let _ = writeln!(out, "# predicted_rate,{rate}");
        }
        None => {
            let _ = writeln!(out, "# predicted_rate,n/a");
        }
    }
    write_file(path, &out)
}

pub fn read_trace_columns(path: &Path) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut t = Vec::new();
    let mut l2 = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.starts_with('#') || line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(CliError::Config(format!("bad trace row: '{line}'")));
        }
        t.push(parse_f64(cols[0])?);
        l2.push(parse_f64(cols[2])?);
    }
    Ok((t, l2))
}

/// `x,u,v` field snapshot.
pub fn write_snapshot(path: &Path, grid: Grid, state: &State2) -> CliResult<()> {
    let mut out = String::from("x,u,v\n");
    for i in 0..grid.n() {
        let _ = writeln!(out, "{},{},{}", grid.x(i), state.u[i], state.v[i]);
    }
    write_file(path, &out)
}

/// `eps,err_u,err_w,err_v_int,err_v_int_post_layer,err_v_int_common` with
/// slopes (and notes) in the footer.
pub fn write_reduction(path: &Path, report: &ReductionReport) -> CliResult<()> {
    let mut out =
        String::from("eps,err_u,err_w,err_v_int,err_v_int_post_layer,err_v_int_common\n");
    for c in &report.cases {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            c.eps, c.err_u, c.err_w, c.err_v_int, c.err_v_int_post_layer, c.err_v_int_common
        );
    }
    let slope = |s: &Option<rdode_core::fit::LineFit>| match s {
        Some(fit) => format!("{}", fit.slope),
        None => "n/a".to_string(),
    };
    let _ = writeln!(out, "# slope_u,{}", slope(&report.slope_u));
    let _ = writeln!(out, "# slope_w,{}", slope(&report.slope_w));
    let _ = writeln!(out, "# slope_v,{}", slope(&report.slope_v));
    for note in &report.notes {
        let _ = writeln!(out, "# note,{}", note.replace(',', ";"));
    }
    write_file(path, &out)
}

pub fn read_reduction_columns(path: &Path) -> CliResult<Vec<(f64, f64, f64, f64)>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.starts_with('#') || line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(CliError::Config(format!("bad reduction row: '{line}'")));
        }
        rows.push((
            parse_f64(cols[0])?,
            parse_f64(cols[1])?,
            parse_f64(cols[2])?,
            parse_f64(cols[5])?,
        ));
    }
    Ok(rows)
}

fn parse_f64(text: &str) -> CliResult<f64> {
    text.parse()
        .map_err(|_| CliError::Config(format!("bad number '{text}'")))
}
