//! CO2 feedback and environment-augmented rational utilities.
//!
//! Concentration evolves as `dc/dt = f(c; z)` with `f` non-increasing in the
//! adoption level `z`. A cost functional `e(z)` summarizes the discomfort along
//! that trajectory, and every rational agent pays `rho * e(z)` whichever
//! technology it picks. Because the penalty is the same for both actions it
//! drops out of the utility difference, and with it out of every equilibrium
//! and stability computation.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Sample, Trajectory, TrajectoryKind};
use crate::equilibria::{numeric_equilibria, stable_set, SolverConfig};
use crate::game::{
    check_unit, utility_difference, utility_rational, Action, GameParams, PopulationMix,
};
use crate::ode;
use crate::{Error, Result};

/// Relative rate of change (per unit time) below which a trajectory counts as settled.
pub const SETTLE_RATE: f64 = 1e-8;

/// Right-hand side of the concentration ODE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriftModel {
    /// `f(c; z) = q + gamma * n_pop * (1 - z) - gamma0 * c`: a baseline
    /// emission rate, per-capita emissions of the unclean share, and linear
    /// decay.
    LinearMisra {
        q: f64,
        gamma: f64,
        n_pop: f64,
        gamma0: f64,
    },
    /// `f` given on a `(c, z)` grid and interpolated bilinearly; queries
    /// outside the grid use the nearest edge.
    CustomTabulated(TabulatedDrift),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedDrift {
    pub c_grid: Vec<f64>,
    pub z_grid: Vec<f64>,
    /// `values[i][j] = f(c_grid[i], z_grid[j])`.
    pub values: Vec<Vec<f64>>,
    /// Latest time at which a long-run limit may be declared.
    #[serde(default = "default_settle_cap")]
    pub settle_cap: f64,
}

fn default_settle_cap() -> f64 {
    1000.0
}

impl TabulatedDrift {
    fn validate(&self) -> Result<()> {
        let ascending = |g: &[f64]| g.len() >= 2 && g.windows(2).all(|w| w[1] > w[0]);
        if !ascending(&self.c_grid) || !ascending(&self.z_grid) {
            return Err(Error::InvalidModel(
                "tabulated grids need at least two strictly increasing points".into(),
            ));
        }
        if self.values.len() != self.c_grid.len()
            || self.values.iter().any(|row| row.len() != self.z_grid.len())
        {
            return Err(Error::InvalidModel(
                "table shape does not match the grids".into(),
            ));
        }
        for (i, row) in self.values.iter().enumerate() {
            if row.windows(2).any(|w| w[1] > w[0]) {
                return Err(Error::InvalidModel(format!(
                    "drift must be non-increasing in z (row c = {})",
                    self.c_grid[i]
                )));
            }
        }
        if !(self.settle_cap > 0.0) {
            return Err(Error::InvalidModel("settle_cap must be positive".into()));
        }
        Ok(())
    }

    fn eval(&self, c: f64, z: f64) -> f64 {
        let (i, tc) = bracket(&self.c_grid, c);
        let (j, tz) = bracket(&self.z_grid, z);
        let v = &self.values;
        let lo = v[i][j] + tz * (v[i][j + 1] - v[i][j]);
        let hi = v[i + 1][j] + tz * (v[i + 1][j + 1] - v[i + 1][j]);
        lo + tc * (hi - lo)
    }
}

/// Cell index and fractional position of `x`, clamped to the grid.
fn bracket(grid: &[f64], x: f64) -> (usize, f64) {
    let last = grid.len() - 2;
    let i = grid
        .partition_point(|g| *g <= x)
        .saturating_sub(1)
        .min(last);
    let t = ((x - grid[i]) / (grid[i + 1] - grid[i])).clamp(0.0, 1.0);
    (i, t)
}

/// Concentration model: drift, initial concentration and horizon.
/// Concentrations are in ppm-equivalents and time in model years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvModel {
    #[serde(flatten)]
    pub drift: DriftModel,
    pub c0: f64,
    /// Finite horizon `T`; `None` stands for an infinite horizon.
    #[serde(default)]
    pub horizon: Option<f64>,
}

impl EnvModel {
    pub fn linear(
        q: f64,
        gamma: f64,
        n_pop: f64,
        gamma0: f64,
        c0: f64,
        horizon: Option<f64>,
    ) -> Result<Self> {
        let m = Self {
            drift: DriftModel::LinearMisra {
                q,
                gamma,
                n_pop,
                gamma0,
            },
            c0,
            horizon,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "c0 must be positive, got {}",
                self.c0
            )));
        }
        if let Some(t) = self.horizon {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidModel(format!(
                    "horizon must be positive, got {t}"
                )));
            }
        }
        match &self.drift {
            DriftModel::LinearMisra {
                q,
                gamma,
                n_pop,
                gamma0,
            } => {
                if !(*gamma0 > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "gamma0 must be positive, got {gamma0}"
                    )));
                }
                if [q, gamma, n_pop]
                    .iter()
                    .any(|v| !(**v >= 0.0 && v.is_finite()))
                {
                    return Err(Error::InvalidModel(
                        "q, gamma and n_pop must be finite and nonnegative".into(),
                    ));
                }
                Ok(())
            }
            DriftModel::CustomTabulated(t) => t.validate(),
        }
    }

    /// `f(c; z)`.
    pub fn drift(&self, c: f64, z: f64) -> f64 {
        match &self.drift {
            DriftModel::LinearMisra {
                q,
                gamma,
                n_pop,
                gamma0,
            } => q + gamma * n_pop * (1.0 - z) - gamma0 * c,
            DriftModel::CustomTabulated(t) => t.eval(c, z),
        }
    }

    /// Analytic steady state of the linear model, `(q + gamma N (1 - z)) / gamma0`.
    pub fn steady_state(&self, z: f64) -> Option<f64> {
        match &self.drift {
            DriftModel::LinearMisra {
                q,
                gamma,
                n_pop,
                gamma0,
            } => Some((q + gamma * n_pop * (1.0 - z)) / gamma0),
            DriftModel::CustomTabulated(_) => None,
        }
    }

    /// Analytic solution of the linear model, `c* + (c0 - c*) exp(-gamma0 t)`.
    pub fn closed_form(&self, t: f64, z: f64) -> Option<f64> {
        match &self.drift {
            DriftModel::LinearMisra { gamma0, .. } => {
                let cs = self.steady_state(z)?;
                Some(cs + (self.c0 - cs) * (-gamma0 * t).exp())
            }
            DriftModel::CustomTabulated(_) => None,
        }
    }

    fn settle_cap(&self) -> f64 {
        match &self.drift {
            DriftModel::LinearMisra { gamma0, .. } => 100.0 / gamma0,
            DriftModel::CustomTabulated(t) => t.settle_cap,
        }
    }
}

/// Discomfort caused by a concentration level.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discomfort {
    #[default]
    Identity,
    Affine {
        scale: f64,
        offset: f64,
    },
    Quadratic,
    /// Concentration above a tolerated threshold, zero below it.
    Excess {
        threshold: f64,
    },
}

impl Discomfort {
    pub fn apply(&self, c: f64) -> f64 {
        match *self {
            Discomfort::Identity => c,
            Discomfort::Affine { scale, offset } => scale * c + offset,
            Discomfort::Quadratic => c * c,
            Discomfort::Excess { threshold } => (c - threshold).max(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostKind {
    /// Mean discomfort over the finite horizon.
    #[default]
    TimeAverage,
    /// Discomfort at the limiting concentration.
    LongRunLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostFunctional {
    #[serde(default)]
    pub kind: CostKind,
    #[serde(default)]
    pub phi: Discomfort,
}

impl CostFunctional {
    pub fn validate(&self) -> Result<()> {
        match self.phi {
            Discomfort::Affine { scale, .. } if scale < 0.0 => Err(Error::InvalidModel(
                "discomfort must be non-decreasing in concentration".into(),
            )),
            _ => Ok(()),
        }
    }
}

fn check_dt(dt: f64, t_end: f64) -> Result<()> {
    if dt > 0.0 && dt <= t_end {
        Ok(())
    } else {
        Err(Error::StepSize { dt, t_end })
    }
}

/// RK4 trajectory of `c(t; z)` on `[0, T]`.
pub fn integrate_co2(m: &EnvModel, z: f64, dt: f64) -> Result<Trajectory> {
    check_unit("z", z)?;
    m.validate()?;
    let t_end = m
        .horizon
        .ok_or_else(|| Error::InvalidModel("trajectory output needs a finite horizon".into()))?;
    check_dt(dt, t_end)?;
    let ts = ode::time_grid(t_end, dt);
    let cs = ode::integrate_on_grid(&|_, c| m.drift(c, z), &ts, m.c0, |c| c);
    Ok(Trajectory {
        kind: TrajectoryKind::Co2,
        seed: None,
        samples: ts
            .into_iter()
            .zip(cs)
            .map(|(at, value)| Sample { at, value })
            .collect(),
    })
}

/// Environmental cost `e(z)`.
///
/// The time average uses the trapezoidal rule on the RK4 grid. The long-run
/// limit is exact for the linear model; tabulated models are integrated until
/// the relative rate of change drops below [`SETTLE_RATE`].
pub fn env_cost(m: &EnvModel, cf: &CostFunctional, z: f64, dt: f64) -> Result<f64> {
    check_unit("z", z)?;
    cf.validate()?;
    match cf.kind {
        CostKind::TimeAverage => {
            let traj = integrate_co2(m, z, dt)?;
            let ts: Vec<f64> = traj.samples.iter().map(|s| s.at).collect();
            let ys: Vec<f64> = traj.samples.iter().map(|s| cf.phi.apply(s.value)).collect();
            Ok(ode::trapezoid(&ts, &ys) / ts.last().copied().unwrap_or(1.0))
        }
        CostKind::LongRunLimit => {
            m.validate()?;
            if let Some(cs) = m.steady_state(z) {
                return Ok(cf.phi.apply(cs));
            }
            let cap = m.settle_cap();
            check_dt(dt, cap)?;
            let f = |_: f64, c: f64| m.drift(c, z);
            let (mut t, mut c) = (0.0, m.c0);
            let mut rate = f64::INFINITY;
            while t < cap {
                let next = ode::rk4_step(&f, t, c, dt);
                rate = (next - c).abs() / (c.abs().max(f64::MIN_POSITIVE) * dt);
                t += dt;
                c = next;
                if rate < SETTLE_RATE {
                    return Ok(cf.phi.apply(c));
                }
            }
            Err(Error::Divergence {
                t,
                rel_change: rate,
            })
        }
    }
}

/// Rational utility including the environmental penalty `rho * e`.
pub fn utility_rational_env(a: Action, z: f64, p: &GameParams, e_val: f64) -> Result<f64> {
    utility_rational_group(a, z, p, p.env_weight, e_val)
}

/// Rational utility of a group with its own environmental weight `rho_i`.
pub fn utility_rational_group(
    a: Action,
    z: f64,
    p: &GameParams,
    rho_i: f64,
    e_val: f64,
) -> Result<f64> {
    Ok(utility_rational(a, z, p)? - penalty(a, rho_i, e_val))
}

/// The penalty does not depend on the action; the argument is kept so the
/// utility difference is formed term by term.
fn penalty(_a: Action, rho: f64, e_val: f64) -> f64 {
    rho * e_val
}

/// `u^E(CT, z) - u^E(UC, z)` for a group with weight `rho_i`, formed as the
/// base difference minus the difference of the penalties.
pub fn utility_difference_group(z: f64, p: &GameParams, rho_i: f64, e_val: f64) -> Result<f64> {
    let base = utility_difference(z, p)?;
    Ok(base - (penalty(Action::Clean, rho_i, e_val) - penalty(Action::Unclean, rho_i, e_val)))
}

pub fn utility_difference_env(z: f64, p: &GameParams, e_val: f64) -> Result<f64> {
    utility_difference_group(z, p, p.env_weight, e_val)
}

/// Rational best response of a group, ties going to CT.
pub fn group_best_response(z: f64, p: &GameParams, rho_i: f64, e_val: f64) -> Result<Action> {
    Ok(if utility_difference_group(z, p, rho_i, e_val)? >= 0.0 {
        Action::Clean
    } else {
        Action::Unclean
    })
}

/// Best-response maps over `zs`, one per group weight; `e_vals[i]` is the
/// environmental cost at `zs[i]`.
pub fn group_argmax_maps(
    p: &GameParams,
    rhos: &[f64],
    zs: &[f64],
    e_vals: &[f64],
) -> Result<Vec<Vec<Action>>> {
    rhos.iter()
        .map(|&rho| {
            zs.iter()
                .zip(e_vals)
                .map(|(&z, &e)| group_best_response(z, p, rho, e))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub grid_n: usize,
    /// `max_z |h^E(z) - h(z)|` over the grid.
    pub max_deviation: f64,
    /// Stable levels found by the numeric attractor scan with environmental utilities.
    pub stable_with_env: Vec<f64>,
    /// Closed-form stable levels with `rho = 0`.
    pub stable_without_env: Vec<f64>,
    pub sets_equal: bool,
    pub regime_label: String,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.max_deviation <= 1e-12 && self.sets_equal
    }
}

/// Compares the environment-augmented game with the plain one: pointwise on
/// the utility difference, and on the stable set obtained through an
/// independent numeric scan that evaluates `e(z)` wherever it needs the
/// utility difference.
pub fn verify_invariance(
    p: &GameParams,
    mix: &PopulationMix,
    m: &EnvModel,
    cf: &CostFunctional,
    grid_n: usize,
    dt: f64,
) -> Result<InvarianceReport> {
    if grid_n < 100 {
        return Err(Error::InvalidConfig(format!(
            "invariance grid needs at least 100 points, got {grid_n}"
        )));
    }
    m.validate()?;
    cf.validate()?;

    let mut max_deviation: f64 = 0.0;
    for i in 0..=grid_n {
        let z = i as f64 / grid_n as f64;
        let e = env_cost(m, cf, z, dt)?;
        let dev = (utility_difference_env(z, p, e)? - utility_difference(z, p)?).abs();
        max_deviation = max_deviation.max(dev);
    }

    let plain = GameParams {
        env_weight: 0.0,
        ..*p
    };
    let without = stable_set(&plain, mix)?;

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let env_gap = |z: f64| -> f64 {
        let zc = z.clamp(0.0, 1.0);
        match env_cost(m, cf, zc, dt).and_then(|e| utility_difference_env(zc, p, e)) {
            Ok(g) => g,
            Err(err) => {
                failure.borrow_mut().get_or_insert(err);
                f64::NAN
            }
        }
    };
    let cfg = SolverConfig {
        grid_n,
        ..SolverConfig::default()
    };
    let with_env: Vec<f64> = numeric_equilibria(&env_gap, mix, &cfg)
        .into_iter()
        .filter(|pt| pt.stable)
        .map(|pt| pt.z_star)
        .collect();
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }

    let without_levels = without.levels();
    let sets_equal = with_env.len() == without_levels.len()
        && with_env
            .iter()
            .zip(&without_levels)
            .all(|(a, b)| (a - b).abs() <= cfg.eps_cmp);
    Ok(InvarianceReport {
        grid_n,
        max_deviation,
        stable_with_env: with_env,
        stable_without_env: without_levels,
        sets_equal,
        regime_label: without.regime_label,
    })
}
