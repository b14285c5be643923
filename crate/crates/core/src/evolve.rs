//! Time integration and the dynamical experiments.
//!
//! The scheme is IMEX: reaction terms advance explicitly (Heun), the
//! diffusion of the `v` component implicitly by backward Euler, so the only
//! linear solve per step is the Neumann tridiagonal system and no CFL
//! restriction applies. Formally first order in time, second order in
//! space. A discrete stationary profile (as produced by the profile
//! module's Newton polish) is a fixed point of the map up to the Heun error
//! `O(dt² g_v g)`.
//!
//! The three-species ε-system integrates its stiff relaxation equation with
//! the exact integrating factor `exp(-(d_b+d) t / ε)`, so `dt` never has to
//! resolve `ε`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fit::{longest_linear_window, loglog_slope, LineFit};
use crate::grid::{sup_norm, Grid};
use crate::kinetics::{KineticModel, ThreeSpeciesModel};
use crate::linalg::NeumannLaplacian;
use crate::profile1d::StationaryProfile;

/// Fields of the two-species system at one time.
#[derive(Debug, Clone)]
pub struct State2 {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// IMEX stepper for `u_t = f`, `v_t = D v_xx + g` with Neumann conditions.
pub struct Imex2<'a> {
    model: &'a KineticModel,
    lap: NeumannLaplacian,
}

impl<'a> Imex2<'a> {
    pub fn new(model: &'a KineticModel, grid: Grid) -> Self {
        Self { model, lap: NeumannLaplacian::new(grid) }
    }

    pub fn grid(&self) -> Grid {
        self.lap.grid()
    }

    /// One step of size `dt`: Heun on `(f, g)`, then backward-Euler
    /// diffusion of `v`. Fails on non-finite values (caller may halve `dt`).
    pub fn step(&self, state: &State2, dt: f64) -> Result<State2> {
        let n = state.u.len();
        let m = self.model;
        let mut k1u = vec![0.0; n];
        let mut k1v = vec![0.0; n];
        for i in 0..n {
            k1u[i] = m.f(state.u[i], state.v[i])?;
            k1v[i] = m.g(state.u[i], state.v[i])?;
        }
        let mut ur = vec![0.0; n];
        let mut vr = vec![0.0; n];
        for i in 0..n {
            let us = state.u[i] + dt * k1u[i];
            let vs = state.v[i] + dt * k1v[i];
            let k2u = m.f(us, vs)?;
            let k2v = m.g(us, vs)?;
            ur[i] = state.u[i] + 0.5 * dt * (k1u[i] + k2u);
            vr[i] = state.v[i] + 0.5 * dt * (k1v[i] + k2v);
        }
        let v = self.lap.solve_identity_minus(dt * m.diffusion(), &vr)?;
        for i in 0..n {
            if !ur[i].is_finite() || !v[i].is_finite() {
                return Err(Error::Convergence(alloc::format!(
                    "non-finite state at t = {}, cell {i}",
                    state.t + dt
                )));
            }
        }
        Ok(State2 { t: state.t + dt, u: ur, v })
    }
}

/// Drive `state` to `t_target` with nominal step `dt`; a rejected (NaN or
/// domain-error) step halves `dt` down to a floor of `1e-12`.
pub fn advance(
    stepper: &Imex2<'_>,
    state: State2,
    dt: f64,
    t_target: f64,
    mut on_step: impl FnMut(&State2),
) -> Result<State2> {
    let mut state = state;
    let mut dt_cur = dt;
    while state.t < t_target - 1e-12 {
        let step_dt = dt_cur.min(t_target - state.t);
        match stepper.step(&state, step_dt) {
            Ok(next) => {
                state = next;
                on_step(&state);
            }
            Err(_) => {
                dt_cur *= 0.5;
                if dt_cur < 1e-12 {
                    return Err(Error::Convergence(
                        "time step collapsed below 1e-12".into(),
                    ));
                }
            }
        }
    }
    Ok(state)
}

/// Exponential-rate fit of a norm series.
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub rate: f64,
    pub window: (f64, f64),
    pub r2: f64,
}

/// Norm time series of a run, relative to a reference profile.
#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub sup_dev: Vec<f64>,
    pub l2_dev: Vec<f64>,
    pub sup_dev_u: Vec<f64>,
    pub sup_dev_v: Vec<f64>,
    pub snapshots: Vec<State2>,
    pub rate_fit: Option<RateFit>,
    /// The spectrum module's dominant rate, when the caller supplied one.
    pub predicted_rate: Option<f64>,
}

/// Initial perturbation shape for the growth experiment.
#[derive(Debug, Clone, Copy)]
pub enum Perturbation {
    /// `amplitude * cos(m π x / L)` added to both fields.
    Cosine(usize),
    /// Uniform per-cell noise in `[-amplitude, amplitude]`, both fields.
    Random,
}

/// Controls for [`growth_experiment`].
#[derive(Debug, Clone)]
pub struct GrowthOpts {
    pub amplitude: f64,
    pub t_end: f64,
    pub dt: f64,
    pub probe: Perturbation,
    pub seed: u64,
    /// Keep roughly this many trace points (downsampling factor is derived).
    pub trace_points: usize,
    /// Store full field snapshots every this many recorded points (0: none).
    pub snapshot_every: usize,
    /// Dominant rate predicted by the spectrum module, for side-by-side
    /// reporting.
    pub predicted_rate: Option<f64>,
}

impl GrowthOpts {
    pub fn new(amplitude: f64, t_end: f64, dt: f64) -> Self {
        Self {
            amplitude,
            t_end,
            dt,
            probe: Perturbation::Random,
            seed: 1,
            trace_points: 2000,
            snapshot_every: 0,
            predicted_rate: None,
        }
    }
}

fn deviation_norms(grid: Grid, state: &State2, ref_u: &[f64], ref_v: &[f64]) -> (f64, f64, f64, f64) {
    let n = ref_u.len();
    let mut du = vec![0.0; n];
    let mut dv = vec![0.0; n];
    for i in 0..n {
        du[i] = state.u[i] - ref_u[i];
        dv[i] = state.v[i] - ref_v[i];
    }
    let sup_u = sup_norm(&du);
    let sup_v = sup_norm(&dv);
    let l2 = (grid.l2_norm(&du).powi(2) + grid.l2_norm(&dv).powi(2)).sqrt();
    (sup_u.max(sup_v), l2, sup_u, sup_v)
}

/// Perturb a stationary profile and integrate, fitting the exponential
/// growth (or decay) rate of the `L²` deviation on its best linear window.
///
/// The perturbation amplitude must stay small against the profile
/// (`amplitude <= 1e-3 * sup |profile|`). If no linear window forms (the
/// deviation saturates immediately), the run fails with a hint to rerun at
/// smaller amplitude.
pub fn growth_experiment(
    profile: &StationaryProfile,
    model: &KineticModel,
    opts: &GrowthOpts,
) -> Result<EvolutionTrace> {
    let grid = profile.grid;
    let n = grid.n();
    let scale = sup_norm(&profile.u).max(sup_norm(&profile.v));
    if opts.amplitude > 1e-3 * scale {
        return Err(Error::Parameter(alloc::format!(
            "perturbation amplitude {} exceeds 1e-3 * profile scale {}",
            opts.amplitude,
            1e-3 * scale
        )));
    }
    let mut state = State2 { t: 0.0, u: profile.u.clone(), v: profile.v.clone() };
    match opts.probe {
        Perturbation::Cosine(mode) => {
            for i in 0..n {
                let c = (mode as f64 * core::f64::consts::PI * grid.x(i) / grid.length()).cos();
                state.u[i] += opts.amplitude * c;
                state.v[i] += opts.amplitude * c;
            }
        }
        Perturbation::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            for i in 0..n {
                state.u[i] += opts.amplitude * rng.random_range(-1.0..1.0);
            }
            for i in 0..n {
                state.v[i] += opts.amplitude * rng.random_range(-1.0..1.0);
            }
        }
    }

    let stepper = Imex2::new(model, grid);
    let steps = (opts.t_end / opts.dt).ceil() as usize;
    let record_every = (steps / opts.trace_points.max(2)).max(1);

    let mut trace = EvolutionTrace {
        times: Vec::new(),
        sup_dev: Vec::new(),
        l2_dev: Vec::new(),
        sup_dev_u: Vec::new(),
        sup_dev_v: Vec::new(),
        snapshots: Vec::new(),
        rate_fit: None,
        predicted_rate: opts.predicted_rate,
    };
    let record = |s: &State2, trace: &mut EvolutionTrace| {
        let (sup, l2, su, sv) = deviation_norms(grid, s, &profile.u, &profile.v);
        trace.times.push(s.t);
        trace.sup_dev.push(sup);
        trace.l2_dev.push(l2);
        trace.sup_dev_u.push(su);
        trace.sup_dev_v.push(sv);
        if opts.snapshot_every > 0 && (trace.times.len() - 1) % opts.snapshot_every == 0 {
            trace.snapshots.push(s.clone());
        }
    };
    record(&state, &mut trace);
    let mut counter = 0usize;
    advance(&stepper, state, opts.dt, opts.t_end, |s| {
        counter += 1;
        if counter % record_every == 0 {
            record(s, &mut trace);
        }
    })?;

    // fit log ||dev||_2 on its longest linear window
    let log_dev: Vec<f64> = trace.l2_dev.iter().map(|d| d.max(1e-300).ln()).collect();
    trace.rate_fit = longest_linear_window(&trace.times, &log_dev, 0.995, 12).map(
        |(i, j, fit)| RateFit {
            rate: fit.slope,
            window: (trace.times[i], trace.times[j - 1]),
            r2: fit.r2,
        },
    );
    if trace.rate_fit.is_none() && opts.amplitude > 0.0 {
        return Err(Error::Convergence(
            "nonlinear regime too early: no linear window in the deviation norm; \
             rerun with a smaller amplitude"
                .into(),
        ));
    }
    Ok(trace)
}

/// Sampled bound for the quadratic remainder of the reaction terms:
/// `max ||N(w)||_2 / (||w||_∞ ||w||_2)` over random perturbations `w`
/// scaled to `amplitude`. The same seed reproduces the same shapes at every
/// amplitude, so sweeps compare like with like.
pub fn taylor_remainder_check(
    profile: &StationaryProfile,
    model: &KineticModel,
    samples: usize,
    amplitude: f64,
    seed: u64,
) -> Result<f64> {
    if !(amplitude > 0.0) {
        return Err(Error::Parameter("amplitude must be positive".into()));
    }
    let grid = profile.grid;
    let n = grid.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let du: Vec<f64> = (0..n).map(|_| amplitude * rng.random_range(-1.0f64..1.0)).collect();
        let dv: Vec<f64> = (0..n).map(|_| amplitude * rng.random_range(-1.0f64..1.0)).collect();
        let mut nu = vec![0.0; n];
        let mut nv = vec![0.0; n];
        for i in 0..n {
            let (u0, v0) = (profile.u[i], profile.v[i]);
            nu[i] = model.f(u0 + du[i], v0 + dv[i])?
                - model.f(u0, v0)?
                - profile.fu[i] * du[i]
                - profile.fv[i] * dv[i];
            nv[i] = model.g(u0 + du[i], v0 + dv[i])?
                - model.g(u0, v0)?
                - profile.gu[i] * du[i]
                - profile.gv[i] * dv[i];
        }
        let w_sup = sup_norm(&du).max(sup_norm(&dv));
        let w_l2 = (grid.l2_norm(&du).powi(2) + grid.l2_norm(&dv).powi(2)).sqrt();
        let n_l2 = (grid.l2_norm(&nu).powi(2) + grid.l2_norm(&nv).powi(2)).sqrt();
        if w_sup > 0.0 && w_l2 > 0.0 {
            worst = worst.max(n_l2 / (w_sup * w_l2));
        }
    }
    Ok(worst)
}

/// Fields of the ε-system at one time.
#[derive(Debug, Clone)]
pub struct State3 {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
}

/// IMEX stepper for the three-species system: exact integrating factor on
/// the `v` relaxation, Heun on the `(u, w)` reactions, backward-Euler
/// diffusion of `w`.
pub struct Imex3<'a> {
    model: &'a ThreeSpeciesModel,
    lap: NeumannLaplacian,
}

impl<'a> Imex3<'a> {
    pub fn new(model: &'a ThreeSpeciesModel, grid: Grid) -> Self {
        Self { model, lap: NeumannLaplacian::new(grid) }
    }

    pub fn step(&self, state: &State3, dt: f64) -> Result<State3> {
        let n = state.u.len();
        let m = self.model;
        let s = m.rates.s();
        // exact relaxation of v with (u, w) frozen
        let decay = (-s * dt / m.eps).exp();
        let mut v = vec![0.0; n];
        for i in 0..n {
            let target = state.u[i] * state.u[i] * state.w[i] / s;
            v[i] = target + (state.v[i] - target) * decay;
        }
        // Heun on (u, w) reactions with the relaxed v frozen
        let mut ur = vec![0.0; n];
        let mut wr = vec![0.0; n];
        for i in 0..n {
            let k1u = m.rhs_u(state.u[i], v[i])?;
            let k1w = m.rhs_w(state.u[i], v[i], state.w[i]);
            let us = state.u[i] + dt * k1u;
            let ws = state.w[i] + dt * k1w;
            let k2u = m.rhs_u(us, v[i])?;
            let k2w = m.rhs_w(us, v[i], ws);
            ur[i] = state.u[i] + 0.5 * dt * (k1u + k2u);
            wr[i] = state.w[i] + 0.5 * dt * (k1w + k2w);
        }
        let w = self.lap.solve_identity_minus(dt * m.diffusion, &wr)?;
        for i in 0..n {
            if !ur[i].is_finite() || !v[i].is_finite() || !w[i].is_finite() {
                return Err(Error::Convergence(alloc::format!(
                    "non-finite three-species state at t = {}",
                    state.t + dt
                )));
            }
        }
        Ok(State3 { t: state.t + dt, u: ur, v, w })
    }
}

/// Initial `v` for the ε-system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum V0Choice {
    /// `v0 = u0² w0 / (d_b + d)` (no initial layer).
    QuasiSteady,
    /// `v0 = 0` (an O(1) initial layer of width ~ ε).
    Zero,
}

/// Per-ε outcome of the reduction experiment.
#[derive(Debug, Clone)]
pub struct ReductionCase {
    pub eps: f64,
    /// `sup_t ||u_ε - u||_∞`.
    pub err_u: f64,
    /// `sup_t ||w_ε - w||_∞`.
    pub err_w: f64,
    /// `∫_0^T ||v_ε - v||_∞ dt`.
    pub err_v_int: f64,
    /// Same integral restricted to `t >= layer_factor * ε`.
    pub err_v_int_post_layer: f64,
    /// Integral over the window `[layer_factor * max(ε), T]` shared by all
    /// ε, so the values compare like for like in the slope fit.
    pub err_v_int_common: f64,
    pub sup_u: f64,
    pub sup_v: f64,
    pub sup_w: f64,
}

/// Reduction-error study across an ε list.
#[derive(Debug, Clone)]
pub struct ReductionReport {
    pub cases: Vec<ReductionCase>,
    pub slope_u: Option<LineFit>,
    pub slope_w: Option<LineFit>,
    /// Slope of the `v` error integral over the shared post-layer window.
    pub slope_v: Option<LineFit>,
    pub notes: Vec<String>,
}

/// Controls for [`reduction_experiment`].
#[derive(Debug, Clone)]
pub struct ReductionOpts {
    pub t_end: f64,
    pub dt: f64,
    pub v0: V0Choice,
    /// The initial layer is cut at `layer_factor * ε`.
    pub layer_factor: f64,
    /// Start of the shared comparison window; defaults to
    /// `layer_factor * max(ε)`. Callers splitting the ε list across runs set
    /// it explicitly so every run measures the same window.
    pub common_window_start: Option<f64>,
}

impl ReductionOpts {
    pub fn new(t_end: f64, dt: f64) -> Self {
        Self {
            t_end,
            dt,
            v0: V0Choice::QuasiSteady,
            layer_factor: 10.0,
            common_window_start: None,
        }
    }
}

/// Integrate the ε-system and its quasi-steady reduction from identical
/// `(u0, w0)` for every ε in the (strictly decreasing) list and measure the
/// approximation errors and uniform bounds.
pub fn reduction_experiment(
    rates: crate::kinetics::CarcinogenesisRates,
    diffusion: f64,
    eps_list: &[f64],
    grid: Grid,
    u0: &[f64],
    w0: &[f64],
    opts: &ReductionOpts,
) -> Result<ReductionReport> {
    if eps_list.is_empty() {
        return Err(Error::Parameter("need at least one epsilon".into()));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Parameter("epsilon list must decrease strictly".into()));
    }
    let admissible = rates.s() / (2.0 * rates.dg);
    for eps in eps_list {
        if !(*eps > 0.0 && *eps < admissible) {
            return Err(Error::Parameter(alloc::format!(
                "eps = {eps} outside the admissible range (0, {admissible})"
            )));
        }
    }
    let n = grid.n();
    if u0.len() != n || w0.len() != n {
        return Err(Error::Shape("initial data length mismatch".into()));
    }

    let mut notes = Vec::new();
    let reduced_model = KineticModel::carcinogenesis2(rates)?.with_diffusion(diffusion)?;
    let stepper2 = Imex2::new(&reduced_model, grid);

    // reference trajectory of the reduced system, shared across ε
    let steps = (opts.t_end / opts.dt).ceil() as usize;
    let mut reduced_states: Vec<State2> = Vec::with_capacity(steps + 1);
    {
        let mut s = State2 { t: 0.0, u: u0.to_vec(), v: w0.to_vec() };
        reduced_states.push(s.clone());
        for _ in 0..steps {
            let dt = opts.dt.min(opts.t_end - s.t).max(0.0);
            if dt == 0.0 {
                break;
            }
            s = stepper2.step(&s, dt)?;
            reduced_states.push(s.clone());
        }
    }

    let mut cases = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        if opts.dt > eps / 4.0 {
            notes.push(alloc::format!(
                "dt = {} > eps/4 = {}: exact exponential v-substep in effect",
                opts.dt,
                eps / 4.0
            ));
        }
        let model3 = ThreeSpeciesModel::new(rates, diffusion, eps)?;
        let stepper3 = Imex3::new(&model3, grid);
        let v0: Vec<f64> = match opts.v0 {
            V0Choice::QuasiSteady => {
                (0..n).map(|i| model3.quasi_steady_v(u0[i], w0[i])).collect()
            }
            V0Choice::Zero => vec![0.0; n],
        };
        let mut s3 = State3 { t: 0.0, u: u0.to_vec(), v: v0, w: w0.to_vec() };

        let mut case = ReductionCase {
            eps,
            err_u: 0.0,
            err_w: 0.0,
            err_v_int: 0.0,
            err_v_int_post_layer: 0.0,
            err_v_int_common: 0.0,
            sup_u: 0.0,
            sup_v: 0.0,
            sup_w: 0.0,
        };
        let layer_end = opts.layer_factor * eps;
        let common_start =
            opts.common_window_start.unwrap_or(opts.layer_factor * eps_list[0]);
        let measure = |s3: &State3, s2: &State2, dt_weight: f64, case: &mut ReductionCase| {
            let mut du: f64 = 0.0;
            let mut dw: f64 = 0.0;
            let mut dv: f64 = 0.0;
            for i in 0..n {
                du = du.max((s3.u[i] - s2.u[i]).abs());
                dw = dw.max((s3.w[i] - s2.v[i]).abs());
                let v_red = s2.u[i] * s2.u[i] * s2.v[i] / rates.s();
                dv = dv.max((s3.v[i] - v_red).abs());
            }
            case.err_u = case.err_u.max(du);
            case.err_w = case.err_w.max(dw);
            case.err_v_int += dt_weight * dv;
            if s3.t >= layer_end {
                case.err_v_int_post_layer += dt_weight * dv;
            }
            if s3.t >= common_start {
                case.err_v_int_common += dt_weight * dv;
            }
            case.sup_u = case.sup_u.max(sup_norm(&s3.u));
            case.sup_v = case.sup_v.max(sup_norm(&s3.v));
            case.sup_w = case.sup_w.max(sup_norm(&s3.w));
        };
        measure(&s3, &reduced_states[0], 0.0, &mut case);
        for s2 in reduced_states.iter().skip(1) {
            let dt = s2.t - s3.t;
            s3 = stepper3.step(&s3, dt)?;
            measure(&s3, s2, dt, &mut case);
        }
        cases.push(case);
    }

    let eps_vec: Vec<f64> = cases.iter().map(|c| c.eps).collect();
    let fit = |select: fn(&ReductionCase) -> f64| -> Option<LineFit> {
        if cases.len() < 2 {
            return None;
        }
        let errs: Vec<f64> = cases.iter().map(select).collect();
        loglog_slope(&eps_vec, &errs).ok()
    };
    Ok(ReductionReport {
        slope_u: fit(|c| c.err_u),
        slope_w: fit(|c| c.err_w),
        slope_v: fit(|c| c.err_v_int_common),
        cases,
        notes,
    })
}

/// Decay/growth rate of a homogeneous kinetic run, for the constant-state
/// experiments: integrates the plain ODE system by the same Heun scheme.
pub fn kinetic_rate_reference(jac: &crate::kinetics::Jacobian2) -> f64 {
    jac.eigenvalues()[0].re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::CarcinogenesisRates;
    use alloc::collections::BTreeMap;

    fn heat_model() -> KineticModel {
        KineticModel::custom("pure_heat", BTreeMap::new(), "0*u", "0*u").unwrap()
    }

    #[test]
    fn constant_state_is_a_fixed_point() {
        let model = KineticModel::gray_scott(0.04, 0.06).unwrap();
        let grid = Grid::new(64, 4.0).unwrap();
        let stepper = Imex2::new(&model, grid);
        // (0, 1) is a constant steady state
        let state = State2 { t: 0.0, u: vec![0.0; 64], v: vec![1.0; 64] };
        let next = stepper.step(&state, 1e-2).unwrap();
        for i in 0..64 {
            assert!((next.u[i] - 0.0).abs() < 1e-12);
            assert!((next.v[i] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn heat_mode_decays_at_the_neumann_rate() {
        let model = heat_model();
        let grid = Grid::new(200, 1.0).unwrap();
        let stepper = Imex2::new(&model, grid);
        let mut state = State2 {
            t: 0.0,
            u: vec![0.0; 200],
            v: grid.cell_centers().iter().map(|x| (core::f64::consts::PI * x).cos()).collect(),
        };
        let v0 = state.v.clone();
        let dt = 1e-3;
        state = advance(&stepper, state, dt, 1.0, |_| {}).unwrap();
        let ratio = state.v[0] / v0[0];
        let rate = -ratio.ln() / 1.0;
        let exact = core::f64::consts::PI.powi(2);
        assert!(
            (rate - exact).abs() / exact < 0.01,
            "decay rate {rate} vs {exact}"
        );
    }

    #[test]
    fn temporal_self_convergence_is_first_order() {
        let model = KineticModel::gray_scott(0.04, 0.06).unwrap();
        let grid = Grid::new(64, 2.0).unwrap();
        let stepper = Imex2::new(&model, grid);
        let init = State2 {
            t: 0.0,
            u: grid.cell_centers().iter().map(|x| 0.5 + 0.2 * (x * 3.0).sin()).collect(),
            v: grid.cell_centers().iter().map(|x| 0.8 + 0.1 * (x * 2.0).cos()).collect(),
        };
        let run = |dt: f64| -> State2 {
            advance(&stepper, init.clone(), dt, 0.5, |_| {}).unwrap()
        };
        let reference = run(1e-5);
        let err = |s: &State2| -> f64 {
            let mut e: f64 = 0.0;
            for i in 0..64 {
                e = e.max((s.u[i] - reference.u[i]).abs());
                e = e.max((s.v[i] - reference.v[i]).abs());
            }
            e
        };
        let e1 = err(&run(2e-3));
        let e2 = err(&run(1e-3));
        let order = (e1 / e2).log2();
        assert!(order >= 0.9, "temporal order {order} (errors {e1}, {e2})");
    }

    #[test]
    fn nonnegativity_preserved_from_nonnegative_data() {
        let model = KineticModel::gray_scott(0.04, 0.06).unwrap();
        let grid = Grid::new(100, 5.0).unwrap();
        let stepper = Imex2::new(&model, grid);
        let state = State2 {
            t: 0.0,
            u: grid.cell_centers().iter().map(|x| (x - 2.5).abs().min(1.0) * 0.5).collect(),
            v: grid.cell_centers().iter().map(|x| 0.2 + 0.1 * (x * 2.0).sin()).collect(),
        };
        let fin = advance(&stepper, state, 1e-3, 2.0, |s| {
            for val in s.u.iter().chain(&s.v) {
                assert!(*val >= -1e-12, "negativity at t = {}", s.t);
                assert!(val.is_finite());
            }
        })
        .unwrap();
        assert!(fin.t >= 2.0 - 1e-9);
    }

    #[test]
    fn zero_perturbation_stays_flat() {
        let model = KineticModel::gray_scott(0.04, 0.04).unwrap();
        let grid = Grid::new(64, 4.0).unwrap();
        // constant stationary state (0, 1) as the profile
        let profile = StationaryProfile::from_samples(
            &model,
            grid,
            vec![0.0; 64],
            vec![1.0; 64],
            vec![0; 64],
            vec![String::from("zero")],
        )
        .unwrap();
        let mut opts = GrowthOpts::new(0.0, 1.0, 1e-3);
        opts.probe = Perturbation::Cosine(1);
        let trace = growth_experiment(&profile, &model, &opts).unwrap();
        let worst = trace.sup_dev.iter().fold(0.0f64, |m, v| m.max(*v));
        assert!(worst < 1e-10 * 1.0, "drift {worst}");
    }

    #[test]
    fn taylor_remainder_linear_model_vanishes() {
        let model = KineticModel::custom(
            "affine",
            BTreeMap::new(),
            "0.5*u - 0.25*v + 0.1",
            "u + v - 1.1",
        )
        .unwrap();
        let grid = Grid::new(32, 1.0).unwrap();
        let profile = StationaryProfile::from_samples(
            &model,
            grid,
            vec![0.4; 32],
            vec![0.7; 32],
            vec![0; 32],
            vec![String::from("affine")],
        )
        .unwrap();
        let ratio = taylor_remainder_check(&profile, &model, 50, 1e-2, 3).unwrap();
        // zero up to cancellation noise in f(u0+du) - f(u0)
        assert!(ratio < 1e-10, "affine remainder must vanish, got {ratio}");
    }

    #[test]
    fn taylor_remainder_bounded_and_nonincreasing() {
        let model = KineticModel::gray_scott(0.04, 0.06).unwrap();
        let grid = Grid::new(64, 4.0).unwrap();
        let profile = StationaryProfile::from_samples(
            &model,
            grid,
            vec![0.0; 64],
            vec![1.0; 64],
            vec![0; 64],
            vec![String::from("trivial")],
        )
        .unwrap();
        let r1 = taylor_remainder_check(&profile, &model, 100, 1e-2, 9).unwrap();
        let r2 = taylor_remainder_check(&profile, &model, 100, 5e-3, 9).unwrap();
        assert!(r1.is_finite() && r1 > 0.0 && r1 < 100.0);
        assert!(r2 <= r1 * 1.02, "halving amplitude must not grow the ratio");
        // the remainder of polynomial kinetics is exactly quadratic, so the
        // lemma ratio approaches the Hessian constant from above while
        // ||N||_2 / ||w||_2 (= ratio * ||w||_inf) keeps shrinking linearly
        assert!(r2 >= 0.5 * r1, "r1 = {r1}, r2 = {r2}");
        assert!(r2 * 5e-3 < 0.7 * (r1 * 1e-2), "||N||/||w||_2 must shrink with amplitude");
    }

    #[test]
    fn reduction_quasi_steady_start_has_zero_initial_v_error() {
        let rates = CarcinogenesisRates { a: 4.0, dc: 1.0, db: 1.0, d: 1.0, dg: 1.0, kappa0: 2.0 };
        let grid = Grid::new(32, 1.0).unwrap();
        let u0: Vec<f64> = grid.cell_centers().iter().map(|x| 1.0 + 0.3 * x).collect();
        let w0 = vec![1.0; 32];
        let model3 = ThreeSpeciesModel::new(rates, 1.0, 0.05).unwrap();
        let v0: Vec<f64> = (0..32).map(|i| model3.quasi_steady_v(u0[i], w0[i])).collect();
        // the identity itself: residual of the v-equation at t = 0 is zero
        for i in 0..32 {
            assert!(model3.rhs_v_scaled(u0[i], v0[i], w0[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn reduction_errors_shrink_with_eps() {
        let rates = CarcinogenesisRates { a: 4.0, dc: 1.0, db: 1.0, d: 1.0, dg: 1.0, kappa0: 2.0 };
        let grid = Grid::new(48, 1.0).unwrap();
        let u0: Vec<f64> =
            grid.cell_centers().iter().map(|x| 1.0 + 0.5 * (core::f64::consts::PI * x).cos()).collect();
        let w0 = vec![1.0; 48];
        let report = reduction_experiment(
            rates,
            1.0,
            &[0.1, 0.05, 0.025],
            grid,
            &u0,
            &w0,
            &ReductionOpts::new(1.0, 5e-4),
        )
        .unwrap();
        assert_eq!(report.cases.len(), 3);
        for w in report.cases.windows(2) {
            assert!(w[1].err_u <= w[0].err_u, "u error must decrease with eps");
            assert!(w[1].err_w <= w[0].err_w, "w error must decrease with eps");
        }
        let slope = report.slope_u.expect("three points fit a slope").slope;
        assert!(slope > 0.5, "u error should scale like eps, slope {slope}");
    }

    #[test]
    fn reduction_rejects_bad_eps() {
        let rates = CarcinogenesisRates { a: 4.0, dc: 1.0, db: 1.0, d: 1.0, dg: 1.0, kappa0: 2.0 };
        let grid = Grid::new(16, 1.0).unwrap();
        let u0 = vec![1.0; 16];
        let w0 = vec![1.0; 16];
        let opts = ReductionOpts::new(0.5, 1e-3);
        // admissible range is (0, 1): 1.5 must be rejected
        assert!(reduction_experiment(rates, 1.0, &[1.5], grid, &u0, &w0, &opts).is_err());
        // non-decreasing list rejected
        assert!(reduction_experiment(rates, 1.0, &[0.05, 0.1], grid, &u0, &w0, &opts).is_err());
    }

    #[test]
    fn u_bound_of_the_eps_system_holds() {
        // ||u_eps(t)|| <= ||u0|| e^{(a - dc) t}
        let rates = CarcinogenesisRates { a: 4.0, dc: 1.0, db: 1.0, d: 1.0, dg: 1.0, kappa0: 2.0 };
        let grid = Grid::new(32, 1.0).unwrap();
        let model3 = ThreeSpeciesModel::new(rates, 1.0, 0.05).unwrap();
        let stepper = Imex3::new(&model3, grid);
        let u0: Vec<f64> = grid.cell_centers().iter().map(|x| 0.5 + x).collect();
        let sup_u0 = sup_norm(&u0);
        let mut s = State3 {
            t: 0.0,
            u: u0.clone(),
            v: (0..32).map(|i| model3.quasi_steady_v(u0[i], 1.0)).collect(),
            w: vec![1.0; 32],
        };
        while s.t < 1.0 - 1e-12 {
            s = stepper.step(&s, 1e-3).unwrap();
            let bound = sup_u0 * ((rates.a - rates.dc) * s.t).exp();
            assert!(
                sup_norm(&s.u) <= bound * (1.0 + 1e-9),
                "bound violated at t = {}: {} > {bound}",
                s.t,
                sup_norm(&s.u)
            );
        }
    }
}
