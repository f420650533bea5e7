//! Closed-form stable sets, one regime table for two-type populations and one
//! for populations with lethargic agents.

use super::{classify_attractor_with, critical_points, mt_amfe_set, SolverConfig, StableSet};
use crate::game::{roots_with, GameParams, PopulationMix};
use crate::{Error, Result};

pub fn stable_set(p: &GameParams, mix: &PopulationMix) -> Result<StableSet> {
    stable_set_with(p, mix, &SolverConfig::default())
}

/// Looks up the table row for `(p, mix)` and verifies each listed level is an
/// equilibrium that passes the attractor test.
///
/// Inputs within `eps_cmp` of a row boundary are rejected with
/// [`Error::RegimeAmbiguity`].
pub fn stable_set_with(
    p: &GameParams,
    mix: &PopulationMix,
    cfg: &SolverConfig,
) -> Result<StableSet> {
    let eps = cfg.eps_cmp;
    let (levels, label) = if mix.alpha_l <= eps {
        two_type_row(p, mix, eps)?
    } else {
        lethargic_row(p, mix, eps)?
    };

    let equilibria = mt_amfe_set(p, mix);
    let critical = critical_points(p, mix);
    let mut points = Vec::with_capacity(levels.len());
    for z in super::dedup_levels(&levels, eps) {
        let pt = equilibria
            .iter()
            .find(|e| (e.z_star - z).abs() <= eps)
            .ok_or(Error::TableMismatch { z })?;
        if !classify_attractor_with(p, mix, pt.z_star, &critical, cfg) {
            return Err(Error::TableMismatch { z });
        }
        let mut pt = *pt;
        pt.stable = true;
        points.push(pt);
    }
    Ok(StableSet {
        points,
        regime_label: label,
    })
}

struct Boundaries {
    eps: f64,
}

impl Boundaries {
    fn check(&self, name: &str, lhs: f64, rhs: f64) -> Result<()> {
        if (lhs - rhs).abs() <= self.eps {
            Err(Error::RegimeAmbiguity {
                boundary: format!("{name} ({lhs} vs {rhs})"),
            })
        } else {
            Ok(())
        }
    }
}

/// Rational/herding populations.
fn two_type_row(p: &GameParams, mix: &PopulationMix, eps: f64) -> Result<(Vec<f64>, String)> {
    let b = Boundaries { eps };
    let (ar, ah) = (mix.alpha_r, mix.alpha_h);
    b.check("alpha_R = 1/2", ar, 0.5)?;
    let roots = roots_with(p, eps).filter(|r| !r.is_double());

    let row = match (ar > 0.5, roots) {
        (true, Some(r)) => (vec![0.0, r.upper], "two-type: alpha_R >= 1/2, gap < m/2"),
        (true, None) => (vec![0.0], "two-type: alpha_R >= 1/2, gap >= m/2"),
        (false, None) => (vec![0.0, ah], "two-type: alpha_R < 1/2, gap >= m/2"),
        (false, Some(r)) => {
            b.check("alpha_H = R+", ah, r.upper)?;
            if r.upper < ah {
                (
                    vec![0.0, ah],
                    "two-type: alpha_R < 1/2, gap < m/2, R+ < alpha_H",
                )
            } else {
                (
                    vec![0.0, r.upper, ar],
                    "two-type: alpha_R < 1/2, gap < m/2, alpha_H <= R+",
                )
            }
        }
    };
    Ok((row.0, row.1.to_string()))
}

/// Populations with lethargic agents.
fn lethargic_row(p: &GameParams, mix: &PopulationMix, eps: f64) -> Result<(Vec<f64>, String)> {
    let b = Boundaries { eps };
    let (ar, ah, al) = (mix.alpha_r, mix.alpha_h, mix.alpha_l);

    let Some(r) = roots_with(p, eps).filter(|r| !r.is_double()) else {
        b.check("alpha_H = 1/2", ah, 0.5)?;
        return Ok(if ah > 0.5 {
            (
                vec![0.0, ah],
                "three-type: gap >= m/2, alpha_H > 1/2".into(),
            )
        } else {
            (vec![0.0], "three-type: gap >= m/2, otherwise".into())
        });
    };

    let joint = ar + ah;
    b.check("alpha_L + alpha_H = R+", al + ah, r.upper)?;
    b.check("alpha_R = 1/2", ar, 0.5)?;
    b.check("alpha_H = R+", ah, r.upper)?;
    b.check("alpha_R + alpha_H = R+", joint, r.upper)?;
    b.check("alpha_R + alpha_H = 1/2", joint, 0.5)?;

    let mut levels = vec![0.0];
    let low = if al + ah < r.upper && ar < 0.5 {
        levels.push(ar);
        "z < 1/2: alpha_R"
    } else {
        "z < 1/2: none"
    };
    let high = if joint > 0.5 {
        if r.upper < ah {
            levels.push(ah);
            "z > 1/2: alpha_H"
        } else if r.upper <= joint {
            levels.push(r.upper);
            "z > 1/2: R+"
        } else {
            levels.push(joint);
            "z > 1/2: alpha_R + alpha_H"
        }
    } else {
        "z > 1/2: none"
    };
    Ok((levels, format!("three-type: gap < m/2, {low}, {high}")))
}
