//! Reaction nonlinearities `f(u, v)`, `g(u, v)` with exact first derivatives.
//!
//! `u` is the non-diffusing component, `v` the diffusing one (for the
//! carcinogenesis family the diffusing growth factor is traditionally called
//! `w`; it is stored in the `v` slot). Three families are built in:
//!
//! * `gray_scott` — `f = -(B+k)u + u²v`, `g = -u²v + B(1-v)`,
//! * `gierer_meinhardt` — `f = -u + u^p/v^q`, `τ v_t = Δv - v + u^r/v^s`,
//!   normalized to `v_t = (1/τ)Δv + g` with `g = (-v + u^r/v^s)/τ`,
//! * `carcinogenesis2` — the quasi-steady-state reduction of the
//!   three-species early-carcinogenesis model.
//!
//! Custom models come from expression strings with symbolically exact
//! Jacobians; see [`expr`].

pub mod expr;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use num_complex::Complex;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use expr::{Expr, Var};

/// Entries of the 2x2 Jacobi matrix of `(f, g)` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian2 {
    pub fu: f64,
    pub fv: f64,
    pub gu: f64,
    pub gv: f64,
}

impl Jacobian2 {
    pub fn trace(&self) -> f64 {
        self.fu + self.gv
    }

    pub fn det(&self) -> f64 {
        self.fu * self.gv - self.fv * self.gu
    }

    /// Both eigenvalues, complex pair ordered by real part (descending).
    pub fn eigenvalues(&self) -> [Complex<f64>; 2] {
        let half_tr = 0.5 * self.trace();
        let disc = half_tr * half_tr - self.det();
        if disc >= 0.0 {
            let root = disc.sqrt();
            [Complex::new(half_tr + root, 0.0), Complex::new(half_tr - root, 0.0)]
        } else {
            let root = (-disc).sqrt();
            [Complex::new(half_tr, root), Complex::new(half_tr, -root)]
        }
    }
}

/// Parameter record of the early-carcinogenesis family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarcinogenesisRates {
    pub a: f64,
    pub dc: f64,
    pub db: f64,
    pub d: f64,
    pub dg: f64,
    pub kappa0: f64,
}

impl CarcinogenesisRates {
    pub fn from_params(params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |key: &str| -> Result<f64> {
            let v = *params
                .get(key)
                .ok_or_else(|| Error::Parameter(alloc::format!("missing parameter '{key}'")))?;
            if !(v > 0.0) {
                return Err(Error::Parameter(alloc::format!(
                    "parameter '{key}' must be positive, got {v}"
                )));
            }
            Ok(v)
        };
        Ok(Self {
            a: get("a")?,
            dc: get("dc")?,
            db: get("db")?,
            d: get("d")?,
            dg: get("dg")?,
            kappa0: get("kappa0")?,
        })
    }

    /// `d_b + d`, the decay rate of the fast intermediate.
    pub fn s(&self) -> f64 {
        self.db + self.d
    }
}

#[derive(Debug, Clone)]
enum Rhs {
    GrayScott {
        b: f64,
        k: f64,
    },
    GiererMeinhardt {
        p: f64,
        q: f64,
        r: f64,
        s: f64,
        tau: f64,
    },
    Carcinogenesis2(CarcinogenesisRates),
    Custom {
        f: Expr,
        g: Expr,
        f_u: Expr,
        f_v: Expr,
        g_u: Expr,
        g_v: Expr,
    },
}

/// A two-component reaction model `(f, g)` with exact Jacobian entries, a
/// parameter record and the diffusion coefficient of the `v` equation.
#[derive(Debug, Clone)]
pub struct KineticModel {
    name: String,
    params: BTreeMap<String, f64>,
    diffusion: f64,
    rhs: Rhs,
}

fn require(params: &BTreeMap<String, f64>, allowed: &[&str]) -> Result<()> {
    for key in params.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Parameter(alloc::format!("unknown parameter '{key}'")));
        }
    }
    Ok(())
}

fn positive(params: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    let v = *params
        .get(key)
        .ok_or_else(|| Error::Parameter(alloc::format!("missing parameter '{key}'")))?;
    if !(v > 0.0) {
        return Err(Error::Parameter(alloc::format!(
            "parameter '{key}' must be positive, got {v}"
        )));
    }
    Ok(v)
}

impl KineticModel {
    /// Construct a built-in family by name: `gray_scott`, `gierer_meinhardt`
    /// or `carcinogenesis2`.
    pub fn builtin(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        match name {
            "gray_scott" => {
                require(params, &["b", "k"])?;
                Self::gray_scott(positive(params, "b")?, positive(params, "k")?)
            }
            "gierer_meinhardt" => {
                require(params, &["p", "q", "r", "s", "tau"])?;
                let s = *params
                    .get("s")
                    .ok_or_else(|| Error::Parameter("missing parameter 's'".into()))?;
                Self::gierer_meinhardt(
                    positive(params, "p")?,
                    positive(params, "q")?,
                    positive(params, "r")?,
                    s,
                    positive(params, "tau")?,
                )
            }
            "carcinogenesis2" => {
                require(params, &["a", "dc", "db", "d", "dg", "kappa0"])?;
                Self::carcinogenesis2(CarcinogenesisRates::from_params(params)?)
            }
            other => Err(Error::Parameter(alloc::format!("unknown built-in model '{other}'"))),
        }
    }

    pub fn gray_scott(b: f64, k: f64) -> Result<Self> {
        if !(b > 0.0) || !(k > 0.0) {
            return Err(Error::Parameter("gray_scott needs b > 0 and k > 0".into()));
        }
        let mut params = BTreeMap::new();
        params.insert(String::from("b"), b);
        params.insert(String::from("k"), k);
        Ok(Self {
            name: String::from("gray_scott"),
            params,
            diffusion: 1.0,
            rhs: Rhs::GrayScott { b, k },
        })
    }

    pub fn gierer_meinhardt(p: f64, q: f64, r: f64, s: f64, tau: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::Parameter(alloc::format!(
                "gierer_meinhardt needs exponent p > 1, got {p}"
            )));
        }
        if !(q > 0.0) || !(r > 0.0) || !(s >= 0.0) || !(tau > 0.0) {
            return Err(Error::Parameter(
                "gierer_meinhardt needs q, r, tau > 0 and s >= 0".into(),
            ));
        }
        let mut params = BTreeMap::new();
        for (key, value) in [("p", p), ("q", q), ("r", r), ("s", s), ("tau", tau)] {
            params.insert(String::from(key), value);
        }
        Ok(Self {
            name: String::from("gierer_meinhardt"),
            params,
            // τ v_t = Δv + ... rescales to v_t = (1/τ) Δv + g/τ
            diffusion: 1.0 / tau,
            rhs: Rhs::GiererMeinhardt { p, q, r, s, tau },
        })
    }

    pub fn carcinogenesis2(rates: CarcinogenesisRates) -> Result<Self> {
        let mut params = BTreeMap::new();
        for (key, value) in [
            ("a", rates.a),
            ("dc", rates.dc),
            ("db", rates.db),
            ("d", rates.d),
            ("dg", rates.dg),
            ("kappa0", rates.kappa0),
        ] {
            if !(value > 0.0) {
                return Err(Error::Parameter(alloc::format!(
                    "carcinogenesis2 parameter '{key}' must be positive"
                )));
            }
            params.insert(String::from(key), value);
        }
        Ok(Self {
            name: String::from("carcinogenesis2"),
            params,
            diffusion: 1.0,
            rhs: Rhs::Carcinogenesis2(rates),
        })
    }

    /// Build a model from expression strings for `f` and `g` in the
    /// variables `u`, `v` and the given parameters. Jacobians are exact
    /// symbolic derivatives of the parsed trees.
    pub fn custom(
        name: &str,
        params: BTreeMap<String, f64>,
        f_src: &str,
        g_src: &str,
    ) -> Result<Self> {
        if params.contains_key("u") || params.contains_key("v") {
            return Err(Error::Parameter("'u' and 'v' are reserved variable names".into()));
        }
        let f = Expr::parse(f_src, &params)?;
        let g = Expr::parse(g_src, &params)?;
        let rhs = Rhs::Custom {
            f_u: f.derivative(Var::U)?,
            f_v: f.derivative(Var::V)?,
            g_u: g.derivative(Var::U)?,
            g_v: g.derivative(Var::V)?,
            f,
            g,
        };
        Ok(Self { name: String::from(name), params, diffusion: 1.0, rhs })
    }

    /// Override the diffusion coefficient of the `v` equation.
    ///
    /// Gierer-Meinhardt derives its diffusion from `tau` and rejects an
    /// override.
    pub fn with_diffusion(mut self, diffusion: f64) -> Result<Self> {
        if matches!(self.rhs, Rhs::GiererMeinhardt { .. }) {
            return Err(Error::Parameter(
                "gierer_meinhardt diffusion is 1/tau; set tau instead".into(),
            ));
        }
        if !(diffusion > 0.0) {
            return Err(Error::Parameter("diffusion must be positive".into()));
        }
        self.diffusion = diffusion;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn diffusion(&self) -> f64 {
        self.diffusion
    }

    /// Number of species (this type always models the two-component system;
    /// the ε-system lives in [`ThreeSpeciesModel`]).
    pub fn components(&self) -> usize {
        2
    }

    pub fn f(&self, u: f64, v: f64) -> Result<f64> {
        let value = match &self.rhs {
            Rhs::GrayScott { b, k } => -(b + k) * u + u * u * v,
            Rhs::GiererMeinhardt { p, q, .. } => {
                gm_domain(u, v)?;
                -u + u.powf(*p) / v.powf(*q)
            }
            Rhs::Carcinogenesis2(rates) => {
                let den = rates.s() + u * v;
                if den == 0.0 {
                    return Err(Error::Domain(alloc::format!(
                        "carcinogenesis2 ratio undefined at ({u}, {v})"
                    )));
                }
                (rates.a * u * v / den - rates.dc) * u
            }
            Rhs::Custom { f, .. } => f.eval(u, v)?,
        };
        finite(value, u, v)
    }

    pub fn g(&self, u: f64, v: f64) -> Result<f64> {
        let value = match &self.rhs {
            Rhs::GrayScott { b, .. } => -u * u * v + b * (1.0 - v),
            Rhs::GiererMeinhardt { r, s, tau, .. } => {
                gm_domain(u, v)?;
                (-v + u.powf(*r) / v.powf(*s)) / tau
            }
            Rhs::Carcinogenesis2(rates) => {
                -rates.dg * v - rates.db / rates.s() * u * u * v + rates.kappa0
            }
            Rhs::Custom { g, .. } => g.eval(u, v)?,
        };
        finite(value, u, v)
    }

    /// Exact partial derivatives `(f_u, f_v; g_u, g_v)` at `(u, v)`.
    pub fn jacobian(&self, u: f64, v: f64) -> Result<Jacobian2> {
        let jac = match &self.rhs {
            Rhs::GrayScott { b, k } => Jacobian2 {
                fu: -(b + k) + 2.0 * u * v,
                fv: u * u,
                gu: -2.0 * u * v,
                gv: -u * u - b,
            },
            Rhs::GiererMeinhardt { p, q, r, s, tau } => {
                gm_domain(u, v)?;
                Jacobian2 {
                    fu: -1.0 + p * u.powf(p - 1.0) / v.powf(*q),
                    fv: -q * u.powf(*p) / v.powf(q + 1.0),
                    gu: r * u.powf(r - 1.0) / v.powf(*s) / tau,
                    gv: (-1.0 - s * u.powf(*r) / v.powf(s + 1.0)) / tau,
                }
            }
            Rhs::Carcinogenesis2(rates) => {
                let s = rates.s();
                let den = s + u * v;
                if den == 0.0 {
                    return Err(Error::Domain(alloc::format!(
                        "carcinogenesis2 ratio undefined at ({u}, {v})"
                    )));
                }
                Jacobian2 {
                    fu: rates.a * u * v * (2.0 * s + u * v) / (den * den) - rates.dc,
                    fv: rates.a * u * u * s / (den * den),
                    gu: -2.0 * rates.db / s * u * v,
                    gv: -rates.dg - rates.db / s * u * u,
                }
            }
            Rhs::Custom { f_u, f_v, g_u, g_v, .. } => Jacobian2 {
                fu: f_u.eval(u, v)?,
                fv: f_v.eval(u, v)?,
                gu: g_u.eval(u, v)?,
                gv: g_v.eval(u, v)?,
            },
        };
        for entry in [jac.fu, jac.fv, jac.gu, jac.gv] {
            finite(entry, u, v)?;
        }
        Ok(jac)
    }
}

fn gm_domain(u: f64, v: f64) -> Result<()> {
    if v <= 0.0 || u < 0.0 {
        return Err(Error::Domain(alloc::format!(
            "gierer_meinhardt needs u >= 0 and v > 0, got ({u}, {v})"
        )));
    }
    Ok(())
}

fn finite(value: f64, u: f64, v: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain(alloc::format!("model value not finite at ({u}, {v})")))
    }
}

/// The three-species ε-system behind `carcinogenesis2`:
///
/// ```text
/// u_t   = (a v / (u + v) - d_c) u
/// ε v_t = -d_b v + u² w - d v
/// w_t   = D Δw - d_g w - u² w + d v + κ_0
/// ```
#[derive(Debug, Clone, Copy)]
pub struct ThreeSpeciesModel {
    pub rates: CarcinogenesisRates,
    pub diffusion: f64,
    pub eps: f64,
}

impl ThreeSpeciesModel {
    pub fn new(rates: CarcinogenesisRates, diffusion: f64, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::Parameter(alloc::format!("eps must be positive, got {eps}")));
        }
        if !(diffusion > 0.0) {
            return Err(Error::Parameter("diffusion must be positive".into()));
        }
        Ok(Self { rates, diffusion, eps })
    }

    pub fn components(&self) -> usize {
        3
    }

    /// `u_t`.
    pub fn rhs_u(&self, u: f64, v: f64) -> Result<f64> {
        let den = u + v;
        if den == 0.0 {
            return Err(Error::Domain("three-species ratio undefined at u + v = 0".into()));
        }
        finite((self.rates.a * v / den - self.rates.dc) * u, u, v)
    }

    /// `ε v_t` (the stiff relaxation right-hand side).
    pub fn rhs_v_scaled(&self, u: f64, v: f64, w: f64) -> f64 {
        -self.rates.s() * v + u * u * w
    }

    /// Reaction part of `w_t` (diffusion excluded).
    pub fn rhs_w(&self, u: f64, v: f64, w: f64) -> f64 {
        -self.rates.dg * w - u * u * w + self.rates.d * v + self.rates.kappa0
    }

    /// The quasi-steady value `v = u² w / (d_b + d)`.
    pub fn quasi_steady_v(&self, u: f64, w: f64) -> f64 {
        u * u * w / self.rates.s()
    }

    /// The two-species model obtained by eliminating `v`.
    pub fn reduced(&self) -> Result<KineticModel> {
        KineticModel::carcinogenesis2(self.rates)?.with_diffusion(self.diffusion)
    }
}

/// Central finite-difference Jacobian, the generic cross-check for the exact
/// entries (also used by the test suites as an independent oracle).
pub fn finite_difference_jacobian(model: &KineticModel, u: f64, v: f64, h: f64) -> Result<Jacobian2> {
    Ok(Jacobian2 {
        fu: (model.f(u + h, v)? - model.f(u - h, v)?) / (2.0 * h),
        fv: (model.f(u, v + h)? - model.f(u, v - h)?) / (2.0 * h),
        gu: (model.g(u + h, v)? - model.g(u - h, v)?) / (2.0 * h),
        gv: (model.g(u, v + h)? - model.g(u, v - h)?) / (2.0 * h),
    })
}

/// Sample admissible points for a model, used by property checks.
pub fn sample_admissible(model: &KineticModel, count: usize, seed: u64) -> Vec<(f64, f64)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(count);
    while pts.len() < count {
        let u = rng.random_range(0.0..4.0);
        let v = rng.random_range(0.05..4.0);
        if model.f(u, v).is_ok() && model.g(u, v).is_ok() {
            pts.push((u, v));
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (String::from(*k), *v)).collect()
    }

    fn gs() -> KineticModel {
        KineticModel::gray_scott(0.04, 0.06).unwrap()
    }

    fn gm() -> KineticModel {
        KineticModel::gierer_meinhardt(2.0, 1.0, 2.0, 0.0, 1.0).unwrap()
    }

    fn carc() -> KineticModel {
        KineticModel::builtin(
            "carcinogenesis2",
            &params(&[("a", 1.0), ("dc", 1.0), ("db", 1.0), ("d", 1.0), ("dg", 1.0), ("kappa0", 10.0)]),
        )
        .unwrap()
    }

    #[test]
    fn gierer_meinhardt_vanishes_at_unit_state() {
        for (p, q) in [(2.0, 1.0), (3.0, 2.0), (1.5, 0.7)] {
            let m = KineticModel::gierer_meinhardt(p, q, 2.0, 0.0, 1.0).unwrap();
            assert_eq!(m.f(1.0, 1.0).unwrap(), 0.0);
            assert_eq!(m.g(1.0, 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn gray_scott_f_vanishes_at_zero_u() {
        let m = gs();
        for v in [0.0, 0.3, 1.0, 5.0] {
            assert_eq!(m.f(0.0, v).unwrap(), 0.0);
        }
    }

    #[test]
    fn gray_scott_value_cross_checked_by_expression_route() {
        // independent evaluation through the parsed expression tree
        let m = gs();
        let c = KineticModel::custom(
            "gray_scott_expr",
            params(&[("b", 0.04), ("k", 0.06)]),
            "-(b+k)*u + u^2*v",
            "-u^2*v + b*(1-v)",
        )
        .unwrap();
        let direct = m.f(0.5, 0.3).unwrap();
        assert!((direct - 0.025).abs() < 1e-16);
        assert!((direct - c.f(0.5, 0.3).unwrap()).abs() < 1e-15);
        for (u, v) in [(0.1, 0.9), (1.3, 0.4), (2.0, 2.0)] {
            assert!((m.f(u, v).unwrap() - c.f(u, v).unwrap()).abs() < 1e-13);
            assert!((m.g(u, v).unwrap() - c.g(u, v).unwrap()).abs() < 1e-13);
            let jm = m.jacobian(u, v).unwrap();
            let jc = c.jacobian(u, v).unwrap();
            assert!((jm.fu - jc.fu).abs() < 1e-13);
            assert!((jm.fv - jc.fv).abs() < 1e-13);
            assert!((jm.gu - jc.gu).abs() < 1e-13);
            assert!((jm.gv - jc.gv).abs() < 1e-13);
        }
    }

    #[test]
    fn gray_scott_g_matches_stated_form() {
        let m = gs();
        let (u, v) = (0.7, 0.2);
        assert!((m.g(u, v).unwrap() - (-u * u * v + 0.04 * (1.0 - v))).abs() < 1e-16);
    }

    #[test]
    fn jacobian_on_branches_matches_known_constants() {
        // Gray-Scott on U = (B+k)/V has f_u = B + k
        let m = gs();
        for v in [0.2, 0.5, 1.0, 3.0] {
            let u = 0.1 / v;
            assert!((m.jacobian(u, v).unwrap().fu - 0.1).abs() < 1e-13);
        }
        // Gierer-Meinhardt on U^{p-1} = V^q has f_u = p - 1
        let m = KineticModel::gierer_meinhardt(3.0, 2.0, 2.0, 1.0, 0.5).unwrap();
        for v in [0.3, 1.0, 2.0] {
            let u = v.powf(2.0 / 2.0);
            assert!((m.jacobian(u, v).unwrap().fu - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_jacobians_match_central_differences() {
        for model in [gs(), gm(), carc()] {
            for (u, v) in sample_admissible(&model, 1000, 7) {
                let exact = model.jacobian(u, v).unwrap();
                let fd = finite_difference_jacobian(&model, u, v, 1e-5).unwrap();
                for (a, b) in [
                    (exact.fu, fd.fu),
                    (exact.fv, fd.fv),
                    (exact.gu, fd.gu),
                    (exact.gv, fd.gv),
                ] {
                    assert!(
                        (a - b).abs() / (1.0 + a.abs()) < 1e-5,
                        "{} jacobian mismatch at ({u}, {v}): {a} vs {b}",
                        model.name()
                    );
                }
            }
        }
    }

    #[test]
    fn carcinogenesis_g_for_unit_rates() {
        // all six rates 1, kappa0 = 10: g = -w - u²w/2 + 10
        let m = carc();
        for (u, w) in [(0.0, 1.0), (1.0, 2.0), (3.0, 0.5)] {
            assert!((m.g(u, w).unwrap() - (-w - u * u * w / 2.0 + 10.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn carcinogenesis_f_vanishes_on_zero_branch() {
        let m = carc();
        for w in [0.0, 0.1, 1.0, 42.0] {
            assert_eq!(m.f(0.0, w).unwrap(), 0.0);
        }
    }

    #[test]
    fn reduction_identity_holds_pointwise() {
        let rates = CarcinogenesisRates { a: 4.0, dc: 1.0, db: 1.0, d: 1.0, dg: 1.0, kappa0: 2.0 };
        let three = ThreeSpeciesModel::new(rates, 1.0, 0.05).unwrap();
        let two = three.reduced().unwrap();
        for (u, w) in [(0.5, 0.2), (1.0, 1.0), (2.5, 0.7), (0.05, 3.0)] {
            let v = three.quasi_steady_v(u, w);
            assert!((three.rhs_u(u, v).unwrap() - two.f(u, w).unwrap()).abs() < 1e-12);
            assert!((three.rhs_w(u, v, w) - two.g(u, w).unwrap()).abs() < 1e-12);
            // the eliminated equation itself vanishes at the quasi-steady value
            assert!(three.rhs_v_scaled(u, v, w).abs() < 1e-12);
        }
    }

    #[test]
    fn three_species_w_equation_form() {
        let rates = CarcinogenesisRates { a: 4.0, dc: 1.0, db: 2.0, d: 3.0, dg: 0.5, kappa0: 7.0 };
        let three = ThreeSpeciesModel::new(rates, 1.0, 0.1).unwrap();
        let (u, v, w) = (1.2, 0.4, 2.0);
        assert!((three.rhs_w(u, v, w) - (-0.5 * w - u * u * w + 3.0 * v + 7.0)).abs() < 1e-14);
    }

    #[test]
    fn parameter_validation() {
        assert!(KineticModel::gray_scott(0.0, 0.1).is_err());
        assert!(KineticModel::gierer_meinhardt(1.0, 1.0, 1.0, 0.0, 1.0).is_err());
        assert!(KineticModel::gierer_meinhardt(2.0, -1.0, 1.0, 0.0, 1.0).is_err());
        assert!(KineticModel::builtin("gray_scott", &params(&[("b", 0.04)])).is_err());
        assert!(KineticModel::builtin("gray_scott", &params(&[("b", 0.04), ("k", 0.06), ("z", 1.0)]))
            .is_err());
        assert!(KineticModel::builtin("nope", &BTreeMap::new()).is_err());
        assert!(KineticModel::gierer_meinhardt(2.0, 1.0, 2.0, 0.0, 1.0)
            .unwrap()
            .with_diffusion(2.0)
            .is_err());
    }

    #[test]
    fn domain_errors() {
        let m = gm();
        assert!(m.f(1.0, 0.0).is_err());
        assert!(m.f(-1.0, 1.0).is_err());
        let rates = CarcinogenesisRates { a: 1.0, dc: 1.0, db: 1.0, d: 1.0, dg: 1.0, kappa0: 1.0 };
        let three = ThreeSpeciesModel::new(rates, 1.0, 0.1).unwrap();
        assert!(three.rhs_u(0.0, 0.0).is_err());
    }

    #[test]
    fn custom_model_round_trip() {
        // f = u - v has the identity branch; trivial Jacobian
        let m = KineticModel::custom("linear", BTreeMap::new(), "u - v", "v - u").unwrap();
        let j = m.jacobian(0.3, 0.9).unwrap();
        assert_eq!((j.fu, j.fv, j.gu, j.gv), (1.0, -1.0, -1.0, 1.0));
    }
}
