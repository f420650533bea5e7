//! Regime sweeps over one or two parameters.
//!
//! Grid points sit at cell midpoints by default, which keeps them off the
//! table boundaries whenever those fall on round values; `exact` switches to
//! an inclusive linspace.

use popgame::equilibria::stable_set;
use popgame::{Error, GameParams, PopulationMix};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Axis, SweepParam};
use crate::CliError;

pub fn axis_values(axis: &Axis, exact: bool) -> Vec<f64> {
    let n = axis.count;
    let span = axis.stop - axis.start;
    if exact {
        if n == 1 {
            return vec![axis.start];
        }
        (0..n)
            .map(|i| axis.start + span * i as f64 / (n - 1) as f64)
            .collect()
    } else {
        (0..n)
            .map(|i| axis.start + span * (i as f64 + 0.5) / n as f64)
            .collect()
    }
}

/// Applies one swept value. Sweeping a type fraction rescales the other two
/// in proportion so the mix still sums to one.
pub fn apply(
    param: SweepParam,
    value: f64,
    p: &mut GameParams,
    mix: &mut PopulationMix,
) -> Result<(), Error> {
    match param {
        SweepParam::Morality => p.morality = value,
        SweepParam::PriceGap => p.price_clean = p.price_unclean + value,
        SweepParam::PriceClean => p.price_clean = value,
        SweepParam::PriceUnclean => p.price_unclean = value,
        SweepParam::EnvWeight => p.env_weight = value,
        SweepParam::AlphaR | SweepParam::AlphaH | SweepParam::AlphaL => {
            let mut a = [mix.alpha_r, mix.alpha_h, mix.alpha_l];
            let k = match param {
                SweepParam::AlphaR => 0,
                SweepParam::AlphaH => 1,
                _ => 2,
            };
            let rest: f64 = (0..3).filter(|i| *i != k).map(|i| a[i]).sum();
            for i in (0..3).filter(|i| *i != k) {
                a[i] = if rest > 0.0 {
                    a[i] / rest * (1.0 - value)
                } else {
                    (1.0 - value) / 2.0
                };
            }
            a[k] = value;
            *mix = PopulationMix::new(a[0], a[1], a[2])?;
        }
    }
    p.validate()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// `(parameter name, value)` per axis.
    pub coords: Vec<(String, f64)>,
    pub stable_set: Vec<f64>,
    pub regime_label: String,
}

/// Evaluates the stable set at every grid point, in row-major order with the
/// first axis outermost. Points on a regime boundary are labelled
/// `ambiguous(...)` with an empty set.
pub fn run_sweep(
    base_p: &GameParams,
    base_mix: &PopulationMix,
    axes: &[Axis],
    exact: bool,
) -> Result<Vec<SweepRow>, CliError> {
    let values: Vec<Vec<f64>> = axes.iter().map(|a| axis_values(a, exact)).collect();
    let mut points: Vec<Vec<f64>> = vec![vec![]];
    for vs in &values {
        points = points
            .into_iter()
            .flat_map(|prefix| {
                vs.iter().map(move |v| {
                    let mut q = prefix.clone();
                    q.push(*v);
                    q
                })
            })
            .collect();
    }

    points
        .par_iter()
        .map(|coords| {
            let (mut p, mut mix) = (*base_p, *base_mix);
            for (axis, v) in axes.iter().zip(coords) {
                apply(axis.param, *v, &mut p, &mut mix).map_err(|e| {
                    CliError::Config(format!("sweep point {}={v}: {e}", axis.param.name()))
                })?;
            }
            let (stable_set, regime_label) = match stable_set(&p, &mix) {
                Ok(s) => (s.levels(), s.regime_label),
                Err(Error::RegimeAmbiguity { boundary }) => {
                    (vec![], format!("ambiguous({boundary})"))
                }
                Err(e) => return Err(e.into()),
            };
            Ok(SweepRow {
                coords: axes
                    .iter()
                    .zip(coords)
                    .map(|(a, v)| (a.param.name().to_string(), *v))
                    .collect(),
                stable_set,
                regime_label,
            })
        })
        .collect()
}
