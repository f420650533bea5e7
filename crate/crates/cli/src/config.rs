//! Run configuration: TOML by default, JSON when the file ends in `.json`.

use std::path::{Path, PathBuf};

use popgame::dynamics::{InitialState, SimConfig};
use popgame::environment::{CostFunctional, EnvModel};
use popgame::{GameParams, PopulationMix};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub game: GameParams,
    pub mix: PopulationMix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub montecarlo: Option<MonteCarloSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicator: Option<ReplicatorSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub env: Option<EnvSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    pub runs: usize,
    #[serde(default = "default_initial")]
    pub initial: InitialState,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_initial() -> InitialState {
    InitialState::Uniform
}

fn default_tolerance() -> f64 {
    2e-2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplicatorSection {
    pub z0: f64,
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
}

fn default_dt() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvSection {
    pub model: EnvModel,
    #[serde(default)]
    pub cost: CostFunctional,
    /// Adoption level used by `env-integrate`.
    #[serde(default)]
    pub z: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Grid size for `env-verify`.
    #[serde(default = "default_env_grid")]
    pub grid_n: usize,
    /// Points of the `e(z)` table written by `env-integrate`.
    #[serde(default = "default_cost_points")]
    pub cost_points: usize,
    /// Group weights compared by `env-verify`.
    #[serde(default)]
    pub groups: Vec<f64>,
}

fn default_env_grid() -> usize {
    1000
}

fn default_cost_points() -> usize {
    21
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axes: Vec<Axis>,
    /// Inclusive grids instead of cell midpoints.
    #[serde(default)]
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Morality,
    PriceGap,
    PriceClean,
    PriceUnclean,
    EnvWeight,
    AlphaR,
    AlphaH,
    AlphaL,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Morality => "morality",
            SweepParam::PriceGap => "price_gap",
            SweepParam::PriceClean => "price_clean",
            SweepParam::PriceUnclean => "price_unclean",
            SweepParam::EnvWeight => "env_weight",
            SweepParam::AlphaR => "alpha_r",
            SweepParam::AlphaH => "alpha_h",
            SweepParam::AlphaL => "alpha_l",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Left out of the canonical config so the hash names the experiment,
    /// not where its files went.
    #[serde(default = "default_dir", skip_serializing)]
    pub dir: PathBuf,
    #[serde(default)]
    pub format: Format,
}

fn default_dir() -> PathBuf {
    PathBuf::from("popgame-out")
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            format: Format::Csv,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?
        };
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.game.validate()?;
        self.mix.validate()?;
        if let Some(sim) = &self.sim {
            sim.validate()?;
        }
        if let Some(mc) = &self.montecarlo {
            if mc.runs == 0 {
                return Err(CliError::Config(
                    "montecarlo.runs must be at least 1".into(),
                ));
            }
            if !(mc.tolerance > 0.0) {
                return Err(CliError::Config(
                    "montecarlo.tolerance must be positive".into(),
                ));
            }
        }
        if let Some(env) = &self.env {
            env.model.validate()?;
            env.cost.validate()?;
            if !(0.0..=1.0).contains(&env.z) {
                return Err(CliError::Config(format!(
                    "env.z must lie in [0, 1], got {}",
                    env.z
                )));
            }
            if env.groups.iter().any(|r| !(*r >= 0.0)) {
                return Err(CliError::Config(
                    "env.groups weights must be nonnegative".into(),
                ));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.axes.is_empty() || sweep.axes.len() > 2 {
                return Err(CliError::Config(format!(
                    "sweep needs one or two axes, got {}",
                    sweep.axes.len()
                )));
            }
            for a in &sweep.axes {
                if a.count == 0 || !a.start.is_finite() || !a.stop.is_finite() {
                    return Err(CliError::Config(format!(
                        "axis {} needs a positive count and finite bounds",
                        a.param.name()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Compact JSON with fields in declaration order; the manifest hash is
    /// taken over these bytes.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
