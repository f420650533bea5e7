//! Turn-by-turn adoption process, Monte Carlo convergence studies and the
//! replicator flow.
//!
//! At step `k` one agent is drawn with type probabilities
//! `(alpha_R, alpha_H, alpha_L)` and makes a one-shot choice against the
//! current adoption level `z_k`:
//!
//! ```text
//! z_{k+1} = z_k + (1{a = CT} - z_k) / (k + 1)
//! ```

mod montecarlo;
pub mod replicator;
pub mod rng;

use serde::{Deserialize, Serialize};

use crate::game::{check_unit, utility_difference_unchecked, GameParams, PopulationMix};
use crate::{Error, Result};

pub use montecarlo::{monte_carlo, InitialState, MatchCount, MonteCarloReport, RunOutcome};
pub use replicator::{
    classify_phase_line, integrate_replicator, integrate_replicator_detailed, replicator_rhs,
    PhasePoint, ReplicatorRun,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryKind {
    TurnByTurn,
    Replicator,
    Co2,
}

/// One recorded state: step index or time, and the state value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub at: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    /// Seed of the generator that drove a stochastic run.
    pub seed: Option<u64>,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn last_value(&self) -> Option<f64> {
        self.samples.last().map(|s| s.value)
    }

    /// Range (max - min) of the trailing `fraction` of the samples, at least
    /// two samples wide.
    pub fn trailing_range(&self, fraction: f64) -> f64 {
        let n = self.samples.len();
        let width = ((n as f64 * fraction).ceil() as usize).clamp(2.min(n), n);
        let tail = &self.samples[n - width..];
        let (lo, hi) = tail
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s.value), hi.max(s.value))
            });
        hi - lo
    }
}

/// Turn-by-turn run settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub steps: u64,
    pub z0: f64,
    pub record_every: u64,
    pub seed: u64,
    /// Index of the first update; the first step moves `z` by `1/(k0 + 1)`
    /// of the way toward the chosen action. With `k0 = 0` the initial state
    /// is overwritten entirely.
    #[serde(default = "default_start_index")]
    pub start_index: u64,
}

fn default_start_index() -> u64 {
    1
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            steps: 100_000,
            z0: 0.5,
            record_every: 1,
            seed: 0,
            start_index: 1,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig(
                "record_every must be at least 1".into(),
            ));
        }
        check_unit("z0", self.z0)
    }
}

/// Which behavioral type a uniform draw `u` in [0, 1) selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentType {
    Rational,
    Herding,
    Lethargic,
}

pub fn agent_type(u: f64, mix: &PopulationMix) -> AgentType {
    if u < mix.alpha_r {
        AgentType::Rational
    } else if u < mix.alpha_r + mix.alpha_h {
        AgentType::Herding
    } else {
        AgentType::Lethargic
    }
}

fn chooses_clean(kind: AgentType, z: f64, p: &GameParams) -> bool {
    match kind {
        AgentType::Rational => utility_difference_unchecked(z, p) >= 0.0,
        AgentType::Herding => z >= 0.5,
        AgentType::Lethargic => false,
    }
}

/// One update of the turn-by-turn process given a uniform draw for the agent type.
pub fn step_turn_by_turn(
    z: f64,
    k: u64,
    p: &GameParams,
    mix: &PopulationMix,
    draw: f64,
) -> Result<f64> {
    check_unit("z_k", z)?;
    Ok(step_unchecked(z, k, p, mix, draw))
}

#[inline]
fn step_unchecked(z: f64, k: u64, p: &GameParams, mix: &PopulationMix, draw: f64) -> f64 {
    let target = if chooses_clean(agent_type(draw, mix), z, p) {
        1.0
    } else {
        0.0
    };
    z + (target - z) / (k as f64 + 1.0)
}

/// Runs `cfg.steps` updates from `cfg.z0`, recording the initial state, every
/// `record_every`-th state and the final state. Identical inputs give
/// identical trajectories.
pub fn simulate(cfg: &SimConfig, p: &GameParams, mix: &PopulationMix) -> Result<Trajectory> {
    cfg.validate()?;
    let mut gen = rng::stream(cfg.seed);
    Ok(run_chain(cfg.z0, cfg, p, mix, &mut gen))
}

pub(crate) fn run_chain(
    z0: f64,
    cfg: &SimConfig,
    p: &GameParams,
    mix: &PopulationMix,
    gen: &mut rng::Stream,
) -> Trajectory {
    let capacity = (cfg.steps / cfg.record_every + 2) as usize;
    let mut samples = Vec::with_capacity(capacity);
    let mut z = z0;
    let mut k = cfg.start_index;
    samples.push(Sample {
        at: k as f64,
        value: z,
    });
    for done in 1..=cfg.steps {
        z = step_unchecked(z, k, p, mix, rng::uniform(gen));
        k += 1;
        if done % cfg.record_every == 0 || done == cfg.steps {
            samples.push(Sample {
                at: k as f64,
                value: z,
            });
        }
    }
    Trajectory {
        kind: TrajectoryKind::TurnByTurn,
        seed: Some(cfg.seed),
        samples,
    }
}
