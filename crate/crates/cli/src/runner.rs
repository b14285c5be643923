//! Subcommand drivers: wire config -> core modules -> CSV/SVG artifacts.

use std::path::{Path, PathBuf};

use crate::config::{parse_probe, ExperimentConfig, ShootSection};
use crate::csvio;
use crate::svg::Plot;
use crate::{as_config, as_numerics, CliError, CliResult};

use rdode_core::evolve::{
    growth_experiment, reduction_experiment, GrowthOpts, ReductionOpts, ReductionReport, V0Choice,
};
use rdode_core::fit::loglog_slope;
use rdode_core::kinetics::KineticModel;
use rdode_core::profile1d::{
    reduced_h, shoot_stationary, solve_branch, touched_constant_states, Branch, ShootOpts,
    StationaryProfile,
};
use rdode_core::spectrum::analyze_spectrum;
use rdode_core::steady::{describe_state, find_constant_states, SearchBox};

/// Resolved invocation: config plus the flag overrides.
pub struct RunContext {
    pub config: ExperimentConfig,
    pub out_dir: PathBuf,
    pub svg: bool,
    pub seed: u64,
    pub threads: usize,
}

impl RunContext {
    pub fn new(
        config: ExperimentConfig,
        out: Option<PathBuf>,
        svg: bool,
        seed: Option<u64>,
        threads: usize,
    ) -> Self {
        let out_dir = out.unwrap_or_else(|| PathBuf::from(config.out_dir()));
        let svg = svg || config.svg();
        let seed = seed.unwrap_or_else(|| config.seed());
        Self { config, out_dir, svg, seed, threads: threads.max(1) }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

pub fn run_steady(ctx: &RunContext) -> CliResult<()> {
    let model = ctx.config.build_model()?;
    let section = ctx
        .config
        .steady
        .as_ref()
        .ok_or_else(|| CliError::Config("steady needs a [steady] section".into()))?;
    let [ulo, uhi, vlo, vhi] = section.search_box;
    let grid = section.grid.unwrap_or([64, 64]);
    let search_box = SearchBox::new((ulo, uhi), (vlo, vhi)).map_err(as_config)?;
    let scan = find_constant_states(&model, search_box, (grid[0], grid[1]))
        .map_err(as_numerics)?;

    let path = ctx.path("states.csv");
    csvio::write_states(&path, &scan.states)?;
    if scan.states.is_empty() {
        eprintln!("warning: no constant states found in the search box");
    }
    println!(
        "steady: {} state(s) in the box, {} failed Newton start(s) -> {}",
        scan.states.len(),
        scan.failed_starts,
        path.display()
    );
    for state in &scan.states {
        println!("  {}", describe_state(state));
    }
    if model.name() == "carcinogenesis2" {
        if let Ok(rates) = ctx.config.carcinogenesis_rates() {
            if rates.a > rates.dc {
                let eq = rdode_core::steady::carcinogenesis_equilibria(&rates)
                    .map_err(as_numerics)?;
                println!(
                    "  closed forms: theta = {:.6}, exists = {} (kappa0^2 = {:.6})",
                    eq.theta,
                    eq.exists,
                    rates.kappa0 * rates.kappa0
                );
                if eq.exists {
                    println!(
                        "    (u-, w-) = ({:.6}, {:.6}) {}; (u+, w+) = ({:.6}, {:.6}) unstable",
                        eq.u_minus,
                        eq.w_minus,
                        if eq.minus_stable { "stable" } else { "unstable" },
                        eq.u_plus,
                        eq.w_plus
                    );
                }
            }
        }
    }
    Ok(())
}

fn build_branch(model: &KineticModel, section: &ShootSection) -> CliResult<Branch> {
    let [lo, hi] = section.v0_range;
    let interval = section
        .branch_interval
        .map(|b| (b[0], b[1]))
        .unwrap_or(((0.75 * lo).max(1e-6), 1.25 * hi));
    let seed = section.branch_seed.unwrap_or(1.0);
    let label = section.branch_label.as_deref().unwrap_or("positive");
    solve_branch(model, interval, seed, label).map_err(as_numerics)
}

fn shoot_from_config(
    ctx: &RunContext,
    model: &KineticModel,
) -> CliResult<(Branch, Vec<StationaryProfile>)> {
    let section = ctx
        .config
        .shoot
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [shoot] section".into()))?;
    let grid = ctx.config.grid()?;
    let branch = build_branch(model, section)?;
    let mut opts = ShootOpts::new((section.v0_range[0], section.v0_range[1]));
    if let Some(points) = section.scan_points {
        opts.scan_points = points;
    }
    if let Some(max) = section.max_profiles {
        opts.max_profiles = max;
    }
    let (profiles, diag) = shoot_stationary(model, &branch, grid, &opts).map_err(as_numerics)?;
    println!(
        "shoot: scanned {} initial values ({} failures, {} crossings), {} profile(s)",
        diag.scanned,
        diag.ivp_failures,
        diag.crossings,
        profiles.len()
    );
    Ok((branch, profiles))
}

fn profile_svg(path: &Path, profile: &StationaryProfile) -> CliResult<()> {
    let x = profile.grid.cell_centers();
    let u_pts: Vec<(f64, f64)> = x.iter().copied().zip(profile.u.iter().copied()).collect();
    let v_pts: Vec<(f64, f64)> = x.iter().copied().zip(profile.v.iter().copied()).collect();
    let mut plot = Plot::from_series("stationary profile", "x", "U, V", &[&u_pts, &v_pts]);
    plot.polyline(&u_pts, "#d62728", "U");
    plot.polyline(&v_pts, "#1f77b4", "V");
    plot.write(path)
}

pub fn run_shoot(ctx: &RunContext) -> CliResult<()> {
    let model = ctx.config.build_model()?;
    let (branch, profiles) = shoot_from_config(ctx, &model)?;
    if profiles.is_empty() {
        eprintln!("warning: no non-constant profile found in the scan range");
        return Ok(());
    }
    let rh = reduced_h(&model, &branch);
    for (i, profile) in profiles.iter().enumerate() {
        let path = ctx.path(&format!("profile_{i:03}.csv"));
        csvio::write_profile(&path, profile)?;
        let (lo, hi) = profile.v_range();
        println!(
            "  profile {i}: {} oscillation(s), V in [{lo:.6}, {hi:.6}], residual {:.2e} -> {}",
            profile.oscillations,
            profile.residual_max,
            path.display()
        );
        for (state, hp) in touched_constant_states(profile, &rh).map_err(as_numerics)? {
            println!(
                "    touches {} (h' = {hp:.6})",
                describe_state(&state)
            );
        }
        if ctx.svg {
            profile_svg(&ctx.path(&format!("profile_{i:03}.svg")), profile)?;
        }
    }
    Ok(())
}

fn reference_profile(
    ctx: &RunContext,
    model: &KineticModel,
    explicit: Option<&str>,
) -> CliResult<StationaryProfile> {
    if let Some(path) = explicit {
        return csvio::read_profile(Path::new(path), model);
    }
    if ctx.config.shoot.is_none() {
        return Err(CliError::Config(
            "no profile file given and no [shoot] section to construct one".into(),
        ));
    }
    let (_, profiles) = shoot_from_config(ctx, model)?;
    profiles
        .into_iter()
        .next()
        .ok_or_else(|| CliError::Numerics(rdode_core::Error::Bracket(
            "shooting found no non-constant profile to analyze".into(),
        )))
}

fn spectrum_svg(path: &Path, report: &rdode_core::spectrum::SpectrumReport) -> CliResult<()> {
    let dense: Vec<(f64, f64)> = report.dense_eigenvalues.iter().map(|z| (z.re, z.im)).collect();
    let reduced: Vec<(f64, f64)> = report.lambda_sequence.iter().map(|(_, l)| (*l, 0.0)).collect();
    let mut series: Vec<&[(f64, f64)]> = vec![&dense, &reduced];
    let essential = [(report.lambda0, 0.0), (report.lambda_cap, 0.0)];
    series.push(&essential);
    let mut plot = Plot::from_series("spectrum of the linearization", "Re", "Im", &series);
    if let Some((mu, m)) = report.gap {
        plot.vertical_band(mu, m, "#2ca02c", "spectral gap");
    }
    plot.segment(report.lambda0, report.lambda_cap, 0.0, "#9467bd", "essential interval");
    plot.scatter(&dense, "#1f77b4", "dense eigenvalues");
    plot.scatter(&reduced, "#d62728", "reduced route");
    plot.write(path)
}

pub fn run_spectrum(ctx: &RunContext) -> CliResult<()> {
    let model = ctx.config.build_model()?;
    let section = ctx.config.spectrum.as_ref();
    let explicit = section.and_then(|s| s.profile.as_deref());
    if explicit.is_none() && ctx.config.shoot.is_none() {
        return Err(CliError::Config(
            "spectrum needs [spectrum].profile or a [shoot] section".into(),
        ));
    }
    let count = section.and_then(|s| s.count).unwrap_or(5);
    let profile = reference_profile(ctx, &model, explicit)?;
    let report = analyze_spectrum(&profile, &model, count).map_err(as_numerics)?;

    let path = ctx.path("spectrum.csv");
    csvio::write_spectrum(&path, &report)?;
    println!(
        "spectrum: essential [{:.8}, {:.8}], {} reduced eigenvalue(s), unstable = {} -> {}",
        report.lambda0,
        report.lambda_cap,
        report.lambda_sequence.len(),
        report.unstable,
        path.display()
    );
    for (n, l) in &report.lambda_sequence {
        println!("  lambda_{n} = {l:.10}");
    }
    match report.gap {
        Some((mu, m)) => println!("  spectral gap [{mu:.8}, {m:.8}]"),
        None => println!("  no spectral gap (no positive spectrum)"),
    }
    if ctx.svg {
        spectrum_svg(&ctx.path("spectrum.svg"), &report)?;
    }
    Ok(())
}

fn trace_svg(path: &Path, times: &[f64], l2: &[f64]) -> CliResult<()> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(l2)
        .filter(|(_, d)| **d > 0.0)
        .map(|(t, d)| (*t, d.log10()))
        .collect();
    let mut plot = Plot::from_series("deviation growth", "t", "log10 ||dev||_2", &[&pts]);
    plot.polyline(&pts, "#1f77b4", "||dev||_2");
    plot.write(path)
}

pub fn run_evolve(ctx: &RunContext) -> CliResult<()> {
    let model = ctx.config.build_model()?;
    let section = ctx
        .config
        .evolve
        .as_ref()
        .ok_or_else(|| CliError::Config("evolve needs an [evolve] section".into()))?;
    let time = ctx
        .config
        .time
        .as_ref()
        .ok_or_else(|| CliError::Config("evolve needs a [time] section".into()))?;
    let profile = reference_profile(ctx, &model, section.profile.as_deref())?;

    // spectrum-side prediction: the essential supremum for heterogeneous
    // profiles, the kinetic eigenvalue for constant states
    let predicted = if profile.is_constant() {
        let jac = model.jacobian(profile.u[0], profile.v[0]).map_err(as_numerics)?;
        Some(jac.eigenvalues()[0].re)
    } else {
        let (_, cap) = rdode_core::spectrum::essential_interval(&profile);
        (cap > 0.0).then_some(cap)
    };

    let mut opts = GrowthOpts::new(section.amplitude, time.t_end, time.dt);
    opts.seed = ctx.seed;
    opts.predicted_rate = predicted;
    if let Some(probe) = &section.probe {
        opts.probe = parse_probe(probe)?;
    }
    opts.snapshot_every = section.snapshot_every.unwrap_or(0);
    let trace = growth_experiment(&profile, &model, &opts).map_err(as_numerics)?;

    let path = ctx.path("trace.csv");
    csvio::write_trace(&path, &trace)?;
    for (i, snapshot) in trace.snapshots.iter().enumerate() {
        csvio::write_snapshot(&ctx.path(&format!("snapshot_{i:04}.csv")), profile.grid, snapshot)?;
    }
    match (&trace.rate_fit, trace.predicted_rate) {
        (Some(fit), Some(pred)) => println!(
            "evolve: fitted rate {:.6} | spectrum prediction {:.6} (window [{:.2}, {:.2}], r2 {:.5}) -> {}",
            fit.rate, pred, fit.window.0, fit.window.1, fit.r2, path.display()
        ),
        (Some(fit), None) => println!(
            "evolve: fitted rate {:.6} (window [{:.2}, {:.2}], r2 {:.5}) -> {}",
            fit.rate, fit.window.0, fit.window.1, fit.r2, path.display()
        ),
        _ => println!("evolve: no rate fit -> {}", path.display()),
    }
    if ctx.svg {
        trace_svg(&ctx.path("trace.svg"), &trace.times, &trace.l2_dev)?;
    }
    Ok(())
}

fn merge_reduction(mut parts: Vec<ReductionReport>) -> ReductionReport {
    let mut cases: Vec<rdode_core::evolve::ReductionCase> =
        parts.iter_mut().flat_map(|p| p.cases.drain(..)).collect();
    cases.sort_by(|a, b| b.eps.partial_cmp(&a.eps).unwrap());
    let mut notes: Vec<String> = parts.iter().flat_map(|p| p.notes.iter().cloned()).collect();
    notes.sort();
    notes.dedup();
    let eps: Vec<f64> = cases.iter().map(|c| c.eps).collect();
    let fit = |values: Vec<f64>| {
        if values.len() < 2 {
            None
        } else {
            loglog_slope(&eps, &values).ok()
        }
    };
    ReductionReport {
        slope_u: fit(cases.iter().map(|c| c.err_u).collect()),
        slope_w: fit(cases.iter().map(|c| c.err_w).collect()),
        slope_v: fit(cases.iter().map(|c| c.err_v_int_common).collect()),
        cases,
        notes,
    }
}

pub fn run_reduce(ctx: &RunContext) -> CliResult<()> {
    let rates = ctx.config.carcinogenesis_rates()?;
    let model = ctx.config.build_model()?; // validates the parameter set
    let diffusion = model.diffusion();
    let section = ctx
        .config
        .reduce
        .as_ref()
        .ok_or_else(|| CliError::Config("reduce needs a [reduce] section".into()))?;
    let time = ctx
        .config
        .time
        .as_ref()
        .ok_or_else(|| CliError::Config("reduce needs a [time] section".into()))?;
    let grid = ctx.config.grid()?;

    let amp = section.u0_cosine.unwrap_or(0.5);
    let w0c = section.w0_constant.unwrap_or(1.0);
    let u0: Vec<f64> = grid
        .cell_centers()
        .iter()
        .map(|x| 1.0 + amp * (core::f64::consts::PI * x / grid.length()).cos())
        .collect();
    let w0 = vec![w0c; grid.n()];

    let mut opts = ReductionOpts::new(time.t_end, time.dt);
    opts.v0 = match section.v0.as_deref().unwrap_or("quasi") {
        "quasi" => V0Choice::QuasiSteady,
        "zero" => V0Choice::Zero,
        other => {
            return Err(CliError::Config(format!(
                "unknown reduce.v0 '{other}' (use \"quasi\" or \"zero\")"
            )))
        }
    };
    if let Some(layer) = section.layer_factor {
        opts.layer_factor = layer;
    }
    opts.common_window_start = Some(opts.layer_factor * section.eps[0]);

    let report = if ctx.threads <= 1 || section.eps.len() == 1 {
        reduction_experiment(rates, diffusion, &section.eps, grid, &u0, &w0, &opts)
            .map_err(as_numerics)?
    } else {
        // fan the ε list out over worker threads; each run measures the same
        // shared window, so the merge is order-independent
        let chunks: Vec<Vec<f64>> = {
            let workers = ctx.threads.min(section.eps.len());
            let mut chunks = vec![Vec::new(); workers];
            for (i, eps) in section.eps.iter().enumerate() {
                chunks[i % workers].push(*eps);
            }
            chunks
        };
        let results: Vec<CliResult<ReductionReport>> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .filter(|c| !c.is_empty())
                .map(|chunk| {
                    let opts = opts.clone();
                    let u0 = &u0;
                    let w0 = &w0;
                    scope.spawn(move || {
                        reduction_experiment(rates, diffusion, chunk, grid, u0, w0, &opts)
                            .map_err(as_numerics)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        let mut parts = Vec::new();
        for r in results {
            parts.push(r?);
        }
        merge_reduction(parts)
    };

    let path = ctx.path("reduction.csv");
    csvio::write_reduction(&path, &report)?;
    let show = |s: &Option<rdode_core::fit::LineFit>| match s {
        Some(fit) => format!("{:.4}", fit.slope),
        None => "n/a".to_string(),
    };
    println!(
        "reduce: {} epsilon value(s); fitted slopes u {}, w {}, v {} -> {}",
        report.cases.len(),
        show(&report.slope_u),
        show(&report.slope_w),
        show(&report.slope_v),
        path.display()
    );
    for c in &report.cases {
        println!(
            "  eps {:.6}: sup|u_eps - u| {:.6e}, sup|w_eps - w| {:.6e}, int|v_eps - v| {:.6e}",
            c.eps, c.err_u, c.err_w, c.err_v_int
        );
    }
    for note in &report.notes {
        println!("  note: {note}");
    }
    Ok(())
}

/// Re-render SVG plots from the CSV artifacts present in the output
/// directory.
pub fn run_report(ctx: &RunContext) -> CliResult<()> {
    let dir = &ctx.out_dir;
    let mut rendered = 0usize;

    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
        if name.starts_with("profile_") && name.ends_with(".csv") {
            let cols = read_numeric_columns(&path, &[0, 1, 2])?;
            let u_pts: Vec<(f64, f64)> = cols[0].iter().copied().zip(cols[1].iter().copied()).collect();
            let v_pts: Vec<(f64, f64)> = cols[0].iter().copied().zip(cols[2].iter().copied()).collect();
            let mut plot = Plot::from_series("stationary profile", "x", "U, V", &[&u_pts, &v_pts]);
            plot.polyline(&u_pts, "#d62728", "U");
            plot.polyline(&v_pts, "#1f77b4", "V");
            plot.write(&path.with_extension("svg"))?;
            rendered += 1;
        }
    }

    let spectrum_path = dir.join("spectrum.csv");
    if spectrum_path.exists() {
        let loaded = csvio::read_spectrum(&spectrum_path)?;
        let dense: Vec<(f64, f64)> = loaded
            .eigenvalues
            .iter()
            .filter(|(_, _, m)| m == "dense")
            .map(|(re, im, _)| (*re, *im))
            .collect();
        let reduced: Vec<(f64, f64)> = loaded
            .eigenvalues
            .iter()
            .filter(|(_, _, m)| m.starts_with("reduced"))
            .map(|(re, im, _)| (*re, *im))
            .collect();
        let essential = [(loaded.lambda0, 0.0), (loaded.lambda_cap, 0.0)];
        let series: Vec<&[(f64, f64)]> = vec![&dense, &reduced, &essential];
        let mut plot = Plot::from_series("spectrum of the linearization", "Re", "Im", &series);
        if let Some((mu, m)) = loaded.gap {
            plot.vertical_band(mu, m, "#2ca02c", "spectral gap");
        }
        plot.segment(loaded.lambda0, loaded.lambda_cap, 0.0, "#9467bd", "essential interval");
        plot.scatter(&dense, "#1f77b4", "dense eigenvalues");
        plot.scatter(&reduced, "#d62728", "reduced route");
        plot.write(&dir.join("spectrum.svg"))?;
        rendered += 1;
    }

    let trace_path = dir.join("trace.csv");
    if trace_path.exists() {
        let (t, l2) = csvio::read_trace_columns(&trace_path)?;
        trace_svg(&dir.join("trace.svg"), &t, &l2)?;
        rendered += 1;
    }

    let reduction_path = dir.join("reduction.csv");
    if reduction_path.exists() {
        let rows = csvio::read_reduction_columns(&reduction_path)?;
        let series: Vec<Vec<(f64, f64)>> = [1, 2, 3]
            .iter()
            .map(|idx| {
                rows.iter()
                    .filter(|r| [r.0, r.1, r.2, r.3][*idx] > 0.0)
                    .map(|r| (r.0.log10(), [r.0, r.1, r.2, r.3][*idx].log10()))
                    .collect()
            })
            .collect();
        let refs: Vec<&[(f64, f64)]> = series.iter().map(|s| s.as_slice()).collect();
        let mut plot =
            Plot::from_series("reduction errors", "log10 eps", "log10 error", &refs);
        for (pts, (color, label)) in series.iter().zip([
            ("#1f77b4", "sup |u_eps - u|"),
            ("#d62728", "sup |w_eps - w|"),
            ("#2ca02c", "int |v_eps - v|"),
        ]) {
            plot.polyline(pts, color, label);
            plot.scatter(pts, color, "");
        }
        plot.write(&dir.join("reduction.svg"))?;
        rendered += 1;
    }

    if rendered == 0 {
        eprintln!("warning: nothing to render in {}", dir.display());
    } else {
        println!("report: rendered {rendered} plot(s) in {}", dir.display());
    }
    Ok(())
}

fn read_numeric_columns(path: &Path, cols: &[usize]) -> CliResult<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = vec![Vec::new(); cols.len()];
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.starts_with('#') || line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        for (slot, col) in cols.iter().enumerate() {
            let value: f64 = fields
                .get(*col)
                .ok_or_else(|| CliError::Config(format!("{}: short row", path.display())))?
                .parse()
                .map_err(|_| CliError::Config(format!("{}: bad number", path.display())))?;
            out[slot].push(value);
        }
    }
    Ok(out)
}
