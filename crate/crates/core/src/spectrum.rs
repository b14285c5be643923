//! Spectrum of the linearization around a stationary profile.
//!
//! The linearized operator is
//!
//! ```text
//! L (φ, ψ) = (0, D Δψ) + [f_u f_v; g_u g_v](x) (φ, ψ),   ψ_x = 0 on the boundary.
//! ```
//!
//! Its spectrum splits into the essential interval `[λ0, Λ0]` spanned by the
//! range of `f_u` along the profile (carried symbolically — a finite matrix
//! has only point spectrum) and isolated eigenvalues. Eigenvalues are
//! computed by two independent routes:
//!
//! * a dense real-Schur eigensolve of the assembled `2N x 2N` matrix,
//! * the reduced scalar problem `Δψ + q(x, λ) ψ = 0` with
//!   `q = (-g_u f_v/(f_u - λ) + g_v - λ)/D`, whose solvability at `λ` is
//!   `μ_n(q(λ)) = 1` for the weighted eigenvalue problem `Δψ + μ q ψ = 0`.
//!
//! The weighted problem is solved by inertia bisection on the symmetric
//! tridiagonal pencil `(-Δ_h, diag(q))`, which is robust for sign-changing
//! potentials.

use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_complex::Complex;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kinetics::KineticModel;
use crate::linalg::{negative_eigenvalue_count, NeumannLaplacian};
use crate::profile1d::StationaryProfile;

/// Dense eigensolves are limited to this many grid points (the matrix is
/// `2N x 2N`).
pub const DENSE_GRID_CAP: usize = 2000;

/// The discretized linearization: four diagonal reaction fields plus the
/// diffusion-scaled Neumann Laplacian in the `v`-block.
#[derive(Debug, Clone)]
pub struct DiscreteLinearization {
    grid: Grid,
    diffusion: f64,
    pub fu: Vec<f64>,
    pub fv: Vec<f64>,
    pub gu: Vec<f64>,
    pub gv: Vec<f64>,
}

impl DiscreteLinearization {
    /// Build directly from fields (synthetic operators, tests).
    pub fn from_fields(
        grid: Grid,
        diffusion: f64,
        fu: Vec<f64>,
        fv: Vec<f64>,
        gu: Vec<f64>,
        gv: Vec<f64>,
    ) -> Result<Self> {
        let n = grid.n();
        if [&fu, &fv, &gu, &gv].iter().any(|f| f.len() != n) {
            return Err(Error::Shape("field lengths must match the grid".into()));
        }
        if !(diffusion > 0.0) {
            return Err(Error::Parameter("diffusion must be positive".into()));
        }
        Ok(Self { grid, diffusion, fu, fv, gu, gv })
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// The full `2N x 2N` matrix `[diag(f_u), diag(f_v); diag(g_u), D Δ_h + diag(g_v)]`.
    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.n();
        let lap = NeumannLaplacian::new(self.grid);
        let diag = lap.diagonal();
        let off = lap.offdiagonal();
        let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            m[(i, i)] = self.fu[i];
            m[(i, n + i)] = self.fv[i];
            m[(n + i, i)] = self.gu[i];
            m[(n + i, n + i)] = self.diffusion * diag[i] + self.gv[i];
            if i + 1 < n {
                m[(n + i, n + i + 1)] = self.diffusion * off;
                m[(n + i + 1, n + i)] = self.diffusion * off;
            }
        }
        m
    }

    /// All `2N` eigenvalues via the real Schur decomposition.
    pub fn eigenvalues(&self) -> Result<Vec<Complex<f64>>> {
        let schur = self
            .dense()
            .try_schur(1e-13, 100_000)
            .ok_or_else(|| Error::Convergence("Schur iteration did not converge".into()))?;
        let mut eigs: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
        eigs.sort_by(|a, b| (b.re, b.im).partial_cmp(&(a.re, a.im)).unwrap());
        Ok(eigs)
    }
}

/// Discretize the linearization around a profile on `n` grid points
/// (resampling the profile if its grid differs).
pub fn assemble_linearization(
    profile: &StationaryProfile,
    model: &KineticModel,
    n: usize,
) -> Result<DiscreteLinearization> {
    let resampled;
    let p = if profile.n() == n {
        profile
    } else {
        resampled = profile.resample(model, n)?;
        &resampled
    };
    DiscreteLinearization::from_fields(
        p.grid,
        model.diffusion(),
        p.fu.clone(),
        p.fv.clone(),
        p.gu.clone(),
        p.gv.clone(),
    )
}

/// The essential interval `[λ0, Λ0]`: range of `f_u` along the profile.
pub fn essential_interval(profile: &StationaryProfile) -> (f64, f64) {
    let lo = profile.fu.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    let hi = profile.fu.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    (lo, hi)
}

/// First `count` positive eigenvalues `μ_1 < μ_2 < ...` of the weighted
/// Neumann problem `Δψ + μ q ψ = 0` on `[0, length]`.
///
/// Computed as pencil eigenvalues of `(-Δ_h, diag(q))` by inertia
/// bisection: every eigenvalue crossing in `μ > 0` is a downward zero
/// crossing of `-Δ_h - μ diag(q)`, so the negative-inertia count locates
/// them exactly. Returns fewer than `count` values when the discrete
/// problem has fewer positive eigenvalues (all-nonpositive `q` yields an
/// empty list).
pub fn weighted_eigenvalues(q: &[f64], length: f64, count: usize) -> Result<Vec<f64>> {
    let n = q.len();
    if n < 2 {
        return Err(Error::Shape("potential needs at least two cells".into()));
    }
    let grid = Grid::new(n, length)?;
    let lap = NeumannLaplacian::new(grid);
    // A = -Δ_h
    let a_diag: Vec<f64> = lap.diagonal().iter().map(|d| -d).collect();
    let off = -lap.offdiagonal();
    let pivmin = f64::MIN_POSITIVE * (1.0 + off * off);

    let positive_entries = q.iter().filter(|x| **x > 0.0).count();
    if positive_entries == 0 {
        return Ok(Vec::new());
    }
    // the zero eigenvalue (constant mode) moves negative as soon as μ > 0
    // when the mean weight is positive; it is not part of the μ_n sequence
    let n0 = usize::from(q.iter().sum::<f64>() > 0.0);
    let available = positive_entries.saturating_sub(n0);

    let count_at = |mu: f64| -> usize {
        let diag: Vec<f64> = a_diag.iter().zip(q).map(|(a, qi)| a - mu * qi).collect();
        let offs = alloc::vec![off; n - 1];
        negative_eigenvalue_count(&diag, &offs, pivmin)
    };

    let q_max = q.iter().fold(0.0f64, |m, v| m.max(*v));
    let mut out = Vec::with_capacity(count);
    let mut lo_prev = 0.0f64;
    for k in 1..=count.min(available) {
        // bracket the k-th crossing
        let mut hi = ((k as f64 * core::f64::consts::PI / length).powi(2) / q_max).max(1e-8);
        let mut grow = 0;
        while count_at(hi) < n0 + k {
            hi *= 2.0;
            grow += 1;
            if grow > 200 {
                return Err(Error::Bracket(alloc::format!(
                    "no upper bracket for weighted eigenvalue {k}"
                )));
            }
        }
        let mut lo = lo_prev.max(0.0);
        if count_at(lo) >= n0 + k {
            lo = 0.0; // safety, should not happen with monotone counts
        }
        for _ in 0..100 {
            if hi - lo <= 1e-13 * (1.0 + hi) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if count_at(mid) >= n0 + k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(hi);
        lo_prev = hi;
    }
    Ok(out)
}

/// The sequence `λ_n` of real eigenvalues accumulating at `λ0` from below,
/// through the reduced scalar route.
#[derive(Debug, Clone)]
pub struct LambdaSequence {
    /// `(n, λ_n)` for each mode the bracketing succeeded on, ascending `n`.
    pub values: Vec<(usize, f64)>,
    /// Modes with no root above the bracket floor (expected for small `n`).
    pub missing: Vec<usize>,
}

impl LambdaSequence {
    pub fn lambdas(&self) -> Vec<f64> {
        self.values.iter().map(|(_, l)| *l).collect()
    }
}

/// For each `n = 1..=count`, locate the root `λ_n < λ0` of
/// `μ_n(q(·, λ)) = 1` nearest `λ0` by a geometric ladder plus bisection.
///
/// Requires autocatalysis (`min f_u > 0`) and compensation
/// (`f_v g_u < 0` pointwise) along the profile.
pub fn find_lambda_sequence(
    profile: &StationaryProfile,
    model: &KineticModel,
    count: usize,
) -> Result<LambdaSequence> {
    let n = profile.n();
    let (lambda0, _) = essential_interval(profile);
    if !(lambda0 > 0.0) {
        return Err(Error::Hypothesis(alloc::format!(
            "autocatalysis fails: min f_u = {lambda0} <= 0"
        )));
    }
    let comp_max = profile
        .fv
        .iter()
        .zip(&profile.gu)
        .map(|(a, b)| a * b)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(comp_max < 0.0) {
        return Err(Error::Hypothesis(alloc::format!(
            "compensation fails: max f_v g_u = {comp_max} >= 0"
        )));
    }

    let d = model.diffusion();
    let length = profile.grid.length();
    let q_at = |lambda: f64| -> Vec<f64> {
        let mut q = Vec::with_capacity(n);
        for i in 0..n {
            q.push(
                (-profile.gu[i] * profile.fv[i] / (profile.fu[i] - lambda) + profile.gv[i]
                    - lambda)
                    / d,
            );
        }
        q
    };
    // μ_n(q(λ)) - 1, treating a missing n-th eigenvalue as +∞
    let phi = |nth: usize, lambda: f64| -> Result<f64> {
        let mu = weighted_eigenvalues(&q_at(lambda), length, nth)?;
        Ok(match mu.get(nth - 1) {
            Some(m) => m - 1.0,
            None => f64::INFINITY,
        })
    };

    let lambda_floor = lambda0 - 10.0 * lambda0.abs();
    let mut values = Vec::new();
    let mut missing = Vec::new();
    'modes: for nth in 1..=count {
        let mut delta = 1e-9 * lambda0.max(1e-3);
        // the weighted eigenvalues vanish as λ ↗ λ0; make sure the ladder
        // starts on the negative side of μ_n - 1
        let mut top = lambda0 - delta;
        if phi(nth, top)? >= 0.0 {
            delta *= 1e-4;
            top = lambda0 - delta;
            if phi(nth, top)? >= 0.0 {
                missing.push(nth);
                continue 'modes;
            }
        }
        // geometric ladder away from λ0 until the sign flips
        let mut hi = top;
        let mut bracket = None;
        while lambda0 - delta > lambda_floor {
            delta *= 2.0;
            let lo = (lambda0 - delta).max(lambda_floor);
            if phi(nth, lo)? >= 0.0 {
                bracket = Some((lo, hi));
                break;
            }
            hi = lo;
            if lo == lambda_floor {
                break;
            }
        }
        let Some((mut lo, mut hi)) = bracket else {
            missing.push(nth);
            continue 'modes;
        };
        for _ in 0..100 {
            if hi - lo <= 1e-10 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if phi(nth, mid)? >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        values.push((nth, 0.5 * (lo + hi)));
    }
    Ok(LambdaSequence { values, missing })
}

/// Largest strip `[μ, M] ⊂ (0, λ0)` whose closure avoids all computed
/// eigenvalue real parts, shrunk by a guard tolerance. `None` when no
/// positive spectrum exists or no positive-width strip survives.
pub fn spectral_gap(lambda0: f64, eig_real_parts: &[f64]) -> Option<(f64, f64)> {
    if !(lambda0 > 0.0) {
        return None;
    }
    let guard = 1e-9 + 1e-6 * lambda0;
    let mut obstacles: Vec<f64> = eig_real_parts
        .iter()
        .copied()
        .filter(|r| *r > 0.0 && *r < lambda0)
        .collect();
    obstacles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut best: Option<(f64, f64)> = None;
    let mut left = 0.0;
    for edge in obstacles.iter().copied().chain(core::iter::once(lambda0)) {
        let width = edge - left;
        if best.map(|(a, b)| width > b - a).unwrap_or(true) {
            best = Some((left, edge));
        }
        left = edge;
    }
    best.and_then(|(a, b)| (b - a > 2.0 * guard).then_some((a + guard, b - guard)))
}

/// Full spectral analysis of a profile: essential interval, both eigenvalue
/// routes, gap certificate and instability verdict.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub lambda0: f64,
    pub lambda_cap: f64,
    /// Dense-route eigenvalues (empty when the grid exceeds the dense cap).
    pub dense_eigenvalues: Vec<Complex<f64>>,
    /// Reduced-route eigenvalues `λ_n` below `λ0`.
    pub lambda_sequence: Vec<(usize, f64)>,
    pub missing_modes: Vec<usize>,
    pub gap: Option<(f64, f64)>,
    pub unstable: bool,
}

/// Run both routes (the reduced one only under its hypotheses) and certify
/// the gap.
pub fn analyze_spectrum(
    profile: &StationaryProfile,
    model: &KineticModel,
    count: usize,
) -> Result<SpectrumReport> {
    let (lambda0, lambda_cap) = essential_interval(profile);
    let dense_eigenvalues = if profile.n() <= DENSE_GRID_CAP {
        assemble_linearization(profile, model, profile.n())?.eigenvalues()?
    } else {
        Vec::new()
    };
    let (lambda_sequence, missing_modes) = match find_lambda_sequence(profile, model, count) {
        Ok(seq) => (seq.values, seq.missing),
        Err(Error::Hypothesis(_)) => (Vec::new(), (1..=count).collect()),
        Err(e) => return Err(e),
    };
    let mut real_parts: Vec<f64> = dense_eigenvalues.iter().map(|z| z.re).collect();
    real_parts.extend(lambda_sequence.iter().map(|(_, l)| *l));
    let gap = spectral_gap(lambda0, &real_parts);
    let unstable = lambda_cap > 0.0 || real_parts.iter().any(|r| *r > 0.0);
    Ok(SpectrumReport {
        lambda0,
        lambda_cap,
        dense_eigenvalues,
        lambda_sequence,
        missing_modes,
        gap,
        unstable,
    })
}

/// Discrete Neumann Laplacian eigenvalues `μ_k = (4/h²) sin²(kπ/(2N))`,
/// `k = 0..N-1` (exact for the cell-centered stencil).
pub fn neumann_laplacian_modes(grid: Grid) -> Vec<f64> {
    let n = grid.n();
    let h = grid.h();
    (0..n)
        .map(|k| {
            let s = (k as f64 * core::f64::consts::PI / (2.0 * n as f64)).sin();
            4.0 / (h * h) * s * s
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;

    fn constant_linearization(
        n: usize,
        length: f64,
        d: f64,
        j: [f64; 4],
    ) -> DiscreteLinearization {
        let grid = Grid::new(n, length).unwrap();
        DiscreteLinearization::from_fields(
            grid,
            d,
            alloc::vec![j[0]; n],
            alloc::vec![j[1]; n],
            alloc::vec![j[2]; n],
            alloc::vec![j[3]; n],
        )
        .unwrap()
    }

    #[test]
    fn hand_written_eight_by_eight() {
        let lin = constant_linearization(4, 4.0, 1.0, [1.0, 1.0, 1.0, 1.0]);
        let m = lin.dense();
        // h = 1, so Δ_h has diagonal [-1, -2, -2, -1] and off-diagonals 1
        let expect = [
            [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0, 1.0, -1.0, 1.0, 0.0],
            [0.0, 0.0, 1.0, 0.0, 0.0, 1.0, -1.0, 1.0],
            [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
        ];
        for r in 0..8 {
            for c in 0..8 {
                assert!(
                    (m[(r, c)] - expect[r][c]).abs() < 1e-15,
                    "entry ({r}, {c}) = {}",
                    m[(r, c)]
                );
            }
        }
    }

    #[test]
    fn constant_fields_reduce_to_per_mode_blocks() {
        let j = [0.6, -1.1, 0.8, -0.9];
        let d = 1.7;
        let lin = constant_linearization(24, 3.0, d, j);
        let mut dense = lin.eigenvalues().unwrap();
        let mut expect: Vec<Complex<f64>> = Vec::new();
        for mu in neumann_laplacian_modes(lin.grid()) {
            let block =
                crate::kinetics::Jacobian2 { fu: j[0], fv: j[1], gu: j[2], gv: j[3] - d * mu };
            expect.extend(block.eigenvalues());
        }
        let key = |z: &Complex<f64>| (z.re, z.im);
        dense.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        expect.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        assert_eq!(dense.len(), expect.len());
        for (a, b) in dense.iter().zip(&expect) {
            assert!((a - b).norm_sqr().sqrt() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn constant_potential_modes() {
        let c = 1.3;
        let length = 1.0;
        let n = 400;
        let q = alloc::vec![c; n];
        let mu = weighted_eigenvalues(&q, length, 5).unwrap();
        for (k, m) in mu.iter().enumerate() {
            let exact = ((k + 1) as f64 * core::f64::consts::PI / length).powi(2) / c;
            assert!(
                (m - exact).abs() / exact < 0.01,
                "mode {}: {m} vs {exact}",
                k + 1
            );
        }
    }

    #[test]
    fn nonpositive_potential_has_no_positive_eigenvalues() {
        let q = alloc::vec![-1.0; 50];
        assert!(weighted_eigenvalues(&q, 1.0, 3).unwrap().is_empty());
    }

    #[test]
    fn sign_changing_potential_still_yields_a_sequence() {
        // positive on the left half, negative on the right
        let n = 200;
        let q: Vec<f64> = (0..n).map(|i| if i < n / 2 { 2.0 } else { -1.0 }).collect();
        let mu = weighted_eigenvalues(&q, 1.0, 4).unwrap();
        assert_eq!(mu.len(), 4);
        for w in mu.windows(2) {
            assert!(w[0] < w[1], "sequence must increase strictly: {mu:?}");
        }
    }

    #[test]
    fn eigenvalue_monotonicity_in_the_potential() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 120;
        for _ in 0..20 {
            let q: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..2.0)).collect();
            let bump: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let q_tilde: Vec<f64> = q.iter().zip(&bump).map(|(a, b)| a + b).collect();
            let mu = weighted_eigenvalues(&q, 1.0, 5).unwrap();
            let mu_tilde = weighted_eigenvalues(&q_tilde, 1.0, 5).unwrap();
            for (a, b) in mu.iter().zip(&mu_tilde) {
                assert!(*b <= a + 1e-10, "monotonicity violated: {b} > {a}");
            }
        }
    }

    #[test]
    fn refinement_keeps_eigenvalues_stable() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        // a smooth random positive potential from a few cosine components
        let coef: Vec<(f64, f64)> =
            (1..4).map(|k| (rng.random_range(0.1..0.4), k as f64)).collect();
        let qf = |x: f64| -> f64 {
            1.0 + coef
                .iter()
                .map(|(a, k)| a * (k * core::f64::consts::PI * x).cos())
                .sum::<f64>()
        };
        let sample = |n: usize| -> Vec<f64> {
            let grid = Grid::new(n, 1.0).unwrap();
            (0..n).map(|i| qf(grid.x(i))).collect()
        };
        let coarse = weighted_eigenvalues(&sample(200), 1.0, 5).unwrap();
        let fine = weighted_eigenvalues(&sample(400), 1.0, 5).unwrap();
        for (a, b) in coarse.iter().zip(&fine) {
            assert!((a - b).abs() / b < 1e-3, "refinement moved {a} -> {b}");
        }
    }

    #[test]
    fn essential_interval_of_synthetic_affine_field() {
        let model =
            KineticModel::custom("minimal", BTreeMap::new(), "u - v", "v - u").unwrap();
        let grid = Grid::new(50, 1.0).unwrap();
        let mut profile = StationaryProfile::from_samples(
            &model,
            grid,
            alloc::vec![0.5; 50],
            alloc::vec![0.5; 50],
            alloc::vec![0; 50],
            alloc::vec![alloc::string::String::from("diag")],
        )
        .unwrap();
        profile.fu = grid.cell_centers().iter().map(|x| 1.0 + x / 1.0).collect();
        let (lo, hi) = essential_interval(&profile);
        assert!((lo - (1.0 + grid.x(0))).abs() < 1e-15);
        assert!((hi - (1.0 + grid.x(49))).abs() < 1e-15);
        assert!(lo > 1.0 - 1e-3 && hi < 2.0 + 1e-3);
    }

    #[test]
    fn gap_from_set_arithmetic() {
        // eigenvalues {-1, -0.5}, essential [1, 2]: the gap fills (0, 1)
        let gap = spectral_gap(1.0, &[-1.0, -0.5]).unwrap();
        assert!(gap.0 > 0.0 && gap.0 < 1e-5);
        assert!((gap.1 - 1.0).abs() < 1e-5);
        // no positive spectrum: nothing to certify
        assert!(spectral_gap(-0.1, &[-1.0]).is_none());
        // an interior eigenvalue splits the strip; the wider side wins
        let gap = spectral_gap(1.0, &[0.7]).unwrap();
        assert!(gap.1 < 0.7 && gap.0 < 1e-5);
    }

    #[test]
    fn ddi_state_destabilized_by_diffusion_at_some_grid_size() {
        // GM at (1,1) with small tau has DDI: the kinetic 2x2 is stable but
        // the spatial linearization picks up positive eigenvalues
        let model = KineticModel::gierer_meinhardt(2.0, 1.0, 2.0, 0.0, 0.1).unwrap();
        let jac = model.jacobian(1.0, 1.0).unwrap();
        assert!(jac.eigenvalues()[0].re < 0.0, "kinetic part must be stable");
        let mut destabilized = false;
        for n in [16, 64, 128] {
            let grid = Grid::new(n, 4.0).unwrap();
            let lin = DiscreteLinearization::from_fields(
                grid,
                model.diffusion(),
                alloc::vec![jac.fu; n],
                alloc::vec![jac.fv; n],
                alloc::vec![jac.gu; n],
                alloc::vec![jac.gv; n],
            )
            .unwrap();
            if lin.eigenvalues().unwrap().iter().any(|z| z.re > 1e-8) {
                destabilized = true;
                break;
            }
        }
        assert!(destabilized, "expected a positive eigenvalue at some grid size");
    }
}
