use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{rng, run_chain, SimConfig};
use crate::equilibria::stable_set;
use crate::game::{GameParams, PopulationMix};
use crate::{Error, Result};

/// Width of the trailing window, as a fraction of the recorded samples, used
/// to decide whether a run has settled.
pub const SETTLE_WINDOW: f64 = 0.01;
/// Maximum range of the trailing window for a settled run.
pub const SETTLE_RANGE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// Every run starts from `SimConfig::z0`.
    Fixed,
    /// Each run draws its start uniformly from [0, 1) with its own generator.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchCount {
    pub z_star: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub seed: u64,
    pub z0: f64,
    pub terminal: f64,
    pub settled: bool,
    /// Stable level the run ended next to, if any.
    pub matched: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub runs: usize,
    pub limits: Vec<f64>,
    /// One entry per stable level, in ascending order, including zero counts.
    pub matched: Vec<MatchCount>,
    pub unmatched: usize,
    /// Runs whose trailing window had not settled (counted in `unmatched`).
    pub unsettled: usize,
    pub tolerance: f64,
    pub regime_label: String,
    pub outcomes: Vec<RunOutcome>,
}

impl MonteCarloReport {
    pub fn hits(&self, z_star: f64) -> usize {
        self.matched
            .iter()
            .find(|m| (m.z_star - z_star).abs() < 1e-12)
            .map_or(0, |m| m.count)
    }
}

/// Runs independent simulations and matches each terminal state against the
/// stable set within `tolerance`. Runs execute in parallel; the report is
/// assembled in run-index order.
pub fn monte_carlo(
    cfg: &SimConfig,
    runs: usize,
    p: &GameParams,
    mix: &PopulationMix,
    initial: InitialState,
    tolerance: f64,
) -> Result<MonteCarloReport> {
    if runs == 0 {
        return Err(Error::InvalidConfig("runs must be at least 1".into()));
    }
    cfg.validate()?;
    let stable = stable_set(p, mix)?;
    let levels = stable.levels();

    let outcomes: Vec<RunOutcome> = (0..runs as u64)
        .into_par_iter()
        .map(|i| {
            let seed = rng::run_seed(cfg.seed, i);
            let mut gen = rng::stream(seed);
            let z0 = match initial {
                InitialState::Fixed => cfg.z0,
                InitialState::Uniform => rng::uniform(&mut gen),
            };
            let run_cfg = SimConfig { seed, z0, ..*cfg };
            let traj = run_chain(z0, &run_cfg, p, mix, &mut gen);
            let terminal = traj.last_value().unwrap_or(z0);
            let settled = traj.trailing_range(SETTLE_WINDOW) < SETTLE_RANGE;
            let matched = if settled {
                levels
                    .iter()
                    .copied()
                    .filter(|z| (z - terminal).abs() <= tolerance)
                    .min_by(|a, b| (a - terminal).abs().total_cmp(&(b - terminal).abs()))
            } else {
                None
            };
            RunOutcome {
                seed,
                z0,
                terminal,
                settled,
                matched,
            }
        })
        .collect();

    let matched: Vec<MatchCount> = levels
        .iter()
        .map(|&z| MatchCount {
            z_star: z,
            count: outcomes.iter().filter(|o| o.matched == Some(z)).count(),
        })
        .collect();
    Ok(MonteCarloReport {
        runs,
        limits: outcomes.iter().map(|o| o.terminal).collect(),
        unmatched: outcomes.iter().filter(|o| o.matched.is_none()).count(),
        unsettled: outcomes.iter().filter(|o| !o.settled).count(),
        matched,
        tolerance,
        regime_label: stable.regime_label,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_lethargic_goes_to_zero() {
        let p = GameParams::from_gap(2.0, 0.5).unwrap();
        let mix = PopulationMix::new(0.0, 0.0, 1.0).unwrap();
        let cfg = SimConfig {
            steps: 20_000,
            record_every: 10,
            ..SimConfig::default()
        };
        let r = monte_carlo(&cfg, 20, &p, &mix, InitialState::Uniform, 2e-2).unwrap();
        assert_eq!(r.unmatched, 0);
        assert_eq!(r.hits(0.0), 20);
        assert!(r.limits.iter().all(|z| *z < 1e-3));
    }

    #[test]
    fn counts_add_up_and_order_is_stable() {
        let p = GameParams::from_gap(2.0, 0.5).unwrap();
        let mix = PopulationMix::two_type(0.3).unwrap();
        let cfg = SimConfig {
            steps: 5_000,
            record_every: 5,
            seed: 99,
            ..SimConfig::default()
        };
        let a = monte_carlo(&cfg, 40, &p, &mix, InitialState::Uniform, 2e-2).unwrap();
        let b = monte_carlo(&cfg, 40, &p, &mix, InitialState::Uniform, 2e-2).unwrap();
        assert_eq!(a, b);
        let total: usize = a.matched.iter().map(|m| m.count).sum();
        assert_eq!(total + a.unmatched, a.runs);
    }

    #[test]
    fn zero_runs_rejected() {
        let p = GameParams::from_gap(2.0, 0.5).unwrap();
        let mix = PopulationMix::two_type(0.3).unwrap();
        assert!(monte_carlo(
            &SimConfig::default(),
            0,
            &p,
            &mix,
            InitialState::Fixed,
            0.02
        )
        .is_err());
    }
}
