//! Experiment configuration: flat TOML with sectioned keys.
//!
//! Unknown keys are rejected everywhere. The full schema is documented in
//! `docs/config.md`; `configs/` ships ready-to-run examples.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::{as_config, CliError, CliResult};
use rdode_core::grid::Grid;
use rdode_core::kinetics::{CarcinogenesisRates, KineticModel};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSection,
    pub domain: Option<DomainSection>,
    pub time: Option<TimeSection>,
    pub steady: Option<SteadySection>,
    pub shoot: Option<ShootSection>,
    pub spectrum: Option<SpectrumSection>,
    pub evolve: Option<EvolveSection>,
    pub reduce: Option<ReduceSection>,
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub name: String,
    /// Diffusion coefficient of the `v` equation (default 1; derived from
    /// `tau` for gierer_meinhardt, which rejects an override).
    pub diffusion: Option<f64>,
    /// Expression for `f(u, v)`; custom models only.
    pub f: Option<String>,
    /// Expression for `g(u, v)`; custom models only.
    pub g: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub length: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub dt: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteadySection {
    /// `[u_lo, u_hi, v_lo, v_hi]`.
    pub search_box: [f64; 4],
    /// Sign-change grid, default 64 x 64.
    pub grid: Option<[usize; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShootSection {
    pub v0_range: [f64; 2],
    pub scan_points: Option<usize>,
    pub max_profiles: Option<usize>,
    /// Branch tabulation interval; defaults to the scan range padded by 25%.
    pub branch_interval: Option<[f64; 2]>,
    pub branch_seed: Option<f64>,
    pub branch_label: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    /// How many λ_n to chase (default 5).
    pub count: Option<usize>,
    /// Load the profile from this CSV instead of shooting.
    pub profile: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    pub amplitude: f64,
    /// `"random"` or `"cosine:<mode>"` (default random).
    pub probe: Option<String>,
    /// Reference profile CSV; defaults to the first shot profile.
    pub profile: Option<String>,
    /// Store field snapshots every this many trace points (0 = none).
    pub snapshot_every: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceSection {
    /// Strictly decreasing ε list.
    pub eps: Vec<f64>,
    /// `"quasi"` (default) or `"zero"` initial `v` for the ε-system.
    pub v0: Option<String>,
    pub layer_factor: Option<f64>,
    /// Amplitude of the cosine bump on `u0 = 1 + a cos(π x / L)`.
    pub u0_cosine: Option<f64>,
    /// Constant initial `w0` (default 1).
    pub w0_constant: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<String>,
    pub seed: Option<u64>,
    pub svg: Option<bool>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> CliResult<()> {
        if let Some(domain) = &self.domain {
            if !(domain.length > 0.0) {
                return Err(CliError::Config("domain.length must be positive".into()));
            }
            if domain.n < 2 {
                return Err(CliError::Config("domain.n must be at least 2".into()));
            }
        }
        if let Some(time) = &self.time {
            if !(time.dt > 0.0) || !(time.t_end > 0.0) {
                return Err(CliError::Config("time.dt and time.t_end must be positive".into()));
            }
        }
        if let Some(steady) = &self.steady {
            let [ulo, uhi, vlo, vhi] = steady.search_box;
            if !(ulo < uhi && vlo < vhi) {
                return Err(CliError::Config("steady.search_box must have positive extent".into()));
            }
        }
        if let Some(shoot) = &self.shoot {
            if !(shoot.v0_range[0] < shoot.v0_range[1]) {
                return Err(CliError::Config("shoot.v0_range must increase".into()));
            }
        }
        if let Some(reduce) = &self.reduce {
            if reduce.eps.is_empty() {
                return Err(CliError::Config("reduce.eps must not be empty".into()));
            }
            if reduce.eps.windows(2).any(|w| w[1] >= w[0]) {
                return Err(CliError::Config("reduce.eps must decrease strictly".into()));
            }
            if reduce.eps.iter().any(|e| !(*e > 0.0)) {
                return Err(CliError::Config("reduce.eps entries must be positive".into()));
            }
        }
        if let Some(evolve) = &self.evolve {
            if !(evolve.amplitude >= 0.0) {
                return Err(CliError::Config("evolve.amplitude must be nonnegative".into()));
            }
        }
        Ok(())
    }

    /// Build the kinetic model described by `[model]`.
    pub fn build_model(&self) -> CliResult<KineticModel> {
        let section = &self.model;
        let model = if section.name == "custom" {
            let f = section
                .f
                .as_deref()
                .ok_or_else(|| CliError::Config("custom model needs model.f".into()))?;
            let g = section
                .g
                .as_deref()
                .ok_or_else(|| CliError::Config("custom model needs model.g".into()))?;
            KineticModel::custom("custom", section.params.clone(), f, g).map_err(as_config)?
        } else {
            if section.f.is_some() || section.g.is_some() {
                return Err(CliError::Config(
                    "model.f / model.g are only valid for model.name = \"custom\"".into(),
                ));
            }
            KineticModel::builtin(&section.name, &section.params).map_err(as_config)?
        };
        match section.diffusion {
            Some(d) => model.with_diffusion(d).map_err(as_config),
            None => Ok(model),
        }
    }

    /// The carcinogenesis rates, for the reduce subcommand.
    pub fn carcinogenesis_rates(&self) -> CliResult<CarcinogenesisRates> {
        if self.model.name != "carcinogenesis2" {
            return Err(CliError::Config(
                "reduce needs model.name = \"carcinogenesis2\"".into(),
            ));
        }
        CarcinogenesisRates::from_params(&self.model.params).map_err(as_config)
    }

    pub fn grid(&self) -> CliResult<Grid> {
        let domain = self
            .domain
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [domain] section".into()))?;
        Grid::new(domain.n, domain.length).map_err(as_config)
    }

    pub fn seed(&self) -> u64 {
        self.output.as_ref().and_then(|o| o.seed).unwrap_or(1)
    }

    pub fn out_dir(&self) -> String {
        self.output
            .as_ref()
            .and_then(|o| o.dir.clone())
            .unwrap_or_else(|| "out".to_string())
    }

    pub fn svg(&self) -> bool {
        self.output.as_ref().and_then(|o| o.svg).unwrap_or(false)
    }
}

/// Parse an evolve probe spec: `random` or `cosine:<mode>`.
pub fn parse_probe(spec: &str) -> CliResult<rdode_core::evolve::Perturbation> {
    use rdode_core::evolve::Perturbation;
    if spec == "random" {
        return Ok(Perturbation::Random);
    }
    if let Some(mode) = spec.strip_prefix("cosine:") {
        let mode: usize = mode
            .parse()
            .map_err(|_| CliError::Config(format!("bad cosine mode in probe '{spec}'")))?;
        return Ok(Perturbation::Cosine(mode));
    }
    Err(CliError::Config(format!(
        "unknown probe '{spec}' (use \"random\" or \"cosine:<mode>\")"
    )))
}
