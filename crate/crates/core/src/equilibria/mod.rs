//! Equilibrium enumeration and attractor classification.
//!
//! An equilibrium is an aggregate adoption level `z` satisfying
//! `z = alpha_R w + alpha_H 1{z >= 1/2}` where `w` is a best-response CT
//! share of the rationals and lethargic agents never adopt. The stable ones
//! are those with positive drift just left of `z` and negative drift just
//! right of it.

mod oracle;
mod table;

use serde::{Deserialize, Serialize};

use crate::game::{self, check_unit, roots_with, GameParams, PopulationMix, EPS_CMP};
use crate::{Error, Result};

pub use oracle::{brute_force_equilibria, fixed_points_with, numeric_equilibria, numeric_roots};
pub use table::{stable_set, stable_set_with};

/// Source of the rational utility difference `u(CT, z) - u(UC, z)`.
pub trait UtilityGap {
    fn gap(&self, z: f64) -> f64;
}

impl UtilityGap for GameParams {
    fn gap(&self, z: f64) -> f64 {
        game::utility_difference_unchecked(z, self)
    }
}

impl<F: Fn(f64) -> f64> UtilityGap for F {
    fn gap(&self, z: f64) -> f64 {
        self(z)
    }
}

/// Tolerances and sampling knobs shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub eps_cmp: f64,
    /// Half-width of the neighborhood probed by the attractor test.
    pub attractor_eps: f64,
    /// Drift samples per side of a candidate attractor.
    pub attractor_samples: usize,
    /// Grid size for the brute-force oracle.
    pub grid_n: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps_cmp: EPS_CMP,
            attractor_eps: 1e-3,
            attractor_samples: 64,
            grid_n: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    BruteForce,
}

/// Aggregate adoption level with the CT share of each behavioral type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint {
    pub z_star: f64,
    /// CT share among rationals (`w`).
    pub mu_r: f64,
    /// Herding choice: 1 when `z_star >= 1/2`.
    pub mu_h: f64,
    /// Lethargic agents never adopt.
    pub mu_l: f64,
    pub stable: bool,
    pub provenance: Provenance,
}

impl EquilibriumPoint {
    /// Builds the point at `z`, recovering `w` from the aggregation identity.
    pub(crate) fn at<G: UtilityGap>(
        z: f64,
        gap: &G,
        mix: &PopulationMix,
        eps: f64,
        provenance: Provenance,
    ) -> Self {
        let mu_h = if z >= 0.5 { 1.0 } else { 0.0 };
        let mu_r = if mix.alpha_r > 0.0 {
            let w = ((z - mix.alpha_h * mu_h) / mix.alpha_r).clamp(0.0, 1.0);
            if w < eps {
                0.0
            } else if w > 1.0 - eps {
                1.0
            } else {
                w
            }
        } else if gap.gap(z) >= 0.0 {
            1.0
        } else {
            0.0
        };
        Self {
            z_star: z,
            mu_r,
            mu_h,
            mu_l: 0.0,
            stable: false,
            provenance,
        }
    }

    /// `alpha_R mu_R + alpha_H mu_H + alpha_L mu_L`.
    pub fn aggregate(&self, mix: &PopulationMix) -> f64 {
        mix.alpha_r * self.mu_r + mix.alpha_h * self.mu_h + mix.alpha_l * self.mu_l
    }
}

/// Stable equilibria together with the table row that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableSet {
    pub points: Vec<EquilibriumPoint>,
    pub regime_label: String,
}

impl StableSet {
    pub fn levels(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.z_star).collect()
    }
}

/// Sorts ascending and drops values within `eps` of an earlier survivor.
/// Earlier entries of `values` win ties.
pub(crate) fn dedup_levels(values: &[f64], eps: f64) -> Vec<f64> {
    let mut kept: Vec<f64> = Vec::with_capacity(values.len());
    for &v in values {
        if !kept.iter().any(|k| (k - v).abs() <= eps) {
            kept.push(v);
        }
    }
    kept.sort_by(f64::total_cmp);
    kept
}

/// Classical Nash equilibria of the all-rational game.
pub fn classical_ne_set(p: &GameParams) -> Vec<f64> {
    match roots_with(p, EPS_CMP) {
        None => vec![0.0],
        Some(r) if r.is_double() => vec![0.0, 0.5],
        Some(r) => vec![0.0, r.lower, r.upper],
    }
}

/// Equilibria of the rational/herding game (no lethargic agents).
///
/// For `alpha_R > 1/2` herding does not change the classical set. Otherwise
/// the set depends on where `alpha_R` sits relative to the lower root. The
/// point `alpha_R = 1/2` with `gap < m/2` falls through the three herding
/// branches and is handled with the classical set, which is what the fixed
/// point analysis gives there.
pub fn alpha_rne_set(p: &GameParams, mix: &PopulationMix) -> Result<Vec<EquilibriumPoint>> {
    if !mix.is_two_type() {
        return Err(Error::InvalidMix(
            "alpha-RNE sets are defined for two-type populations; use mt_amfe_set".into(),
        ));
    }
    let eps = EPS_CMP;
    let levels = match roots_with(p, eps) {
        Some(r) if !r.is_double() => {
            if mix.alpha_r > 0.5 - eps {
                classical_ne_set(p)
            } else if mix.alpha_r < r.lower {
                vec![0.0, mix.alpha_h]
            } else {
                vec![0.0, r.lower, r.upper, mix.alpha_r]
            }
        }
        _ => {
            if mix.alpha_r > 0.5 {
                classical_ne_set(p)
            } else {
                vec![0.0, mix.alpha_h]
            }
        }
    };
    Ok(finish_points(
        &dedup_levels(&levels, eps),
        p,
        mix,
        Provenance::ClosedForm,
    ))
}

/// Closed-form multi-type equilibria.
///
/// Cases follow the sign of the utility difference: when `gap > m/2` rationals
/// never adopt; when `gap = m/2` they are indifferent only at 1/2; otherwise
/// they adopt exactly on `(R-, R+)` and are indifferent at the roots.
pub fn mt_amfe_set(p: &GameParams, mix: &PopulationMix) -> Vec<EquilibriumPoint> {
    let eps = EPS_CMP;
    let (ar, ah) = (mix.alpha_r, mix.alpha_h);
    let mut levels = vec![0.0];
    match roots_with(p, eps) {
        None => {
            if ah >= 0.5 - eps {
                levels.push(ah);
            }
        }
        Some(r) if r.is_double() => {
            if ah > 0.5 + eps {
                levels.push(ah);
            }
            if ah <= 0.5 + eps && ah + ar >= 0.5 - eps {
                levels.push(0.5);
            }
        }
        Some(r) => {
            let (lo, hi) = (r.lower, r.upper);
            // Low region, herding on UC.
            if lo + eps < ar && ar < 0.5 - eps {
                levels.push(ar);
            }
            if ar >= lo - eps {
                levels.push(lo);
            }
            // High region, herding on CT.
            let joint = ar + ah;
            if joint >= 0.5 - eps && joint < hi - eps {
                levels.push(joint);
            }
            if ah <= hi + eps && hi <= joint + eps {
                levels.push(hi);
            }
            if ah > hi + eps {
                levels.push(ah);
            }
        }
    }
    finish_points(&dedup_levels(&levels, eps), p, mix, Provenance::ClosedForm)
}

fn finish_points(
    levels: &[f64],
    p: &GameParams,
    mix: &PopulationMix,
    provenance: Provenance,
) -> Vec<EquilibriumPoint> {
    let cfg = SolverConfig::default();
    let critical = critical_points(p, mix);
    levels
        .iter()
        .map(|&z| {
            let mut pt = EquilibriumPoint::at(z, p, mix, cfg.eps_cmp, provenance);
            pt.stable = classify_attractor_with(p, mix, z, &critical, &cfg);
            pt
        })
        .collect()
}

/// Mean one-step movement of the turn-by-turn process at `z`. Lethargic agents
/// contribute nothing, so the same expression covers two- and three-type
/// populations.
pub fn drift(z: f64, p: &GameParams, mix: &PopulationMix) -> Result<f64> {
    check_unit("z", z)?;
    Ok(drift_with(p, mix, z))
}

pub fn drift_with<G: UtilityGap>(gap: &G, mix: &PopulationMix, z: f64) -> f64 {
    let rational = if gap.gap(z) >= 0.0 { mix.alpha_r } else { 0.0 };
    let herding = if z >= 0.5 { mix.alpha_h } else { 0.0 };
    rational + herding - z
}

/// Points where the drift is discontinuous or an equilibrium may sit; used to
/// keep attractor neighborhoods from straddling two of them.
pub fn critical_points(p: &GameParams, mix: &PopulationMix) -> Vec<f64> {
    let mut pts = vec![
        0.0,
        0.5,
        1.0,
        mix.alpha_r,
        mix.alpha_h,
        mix.alpha_r + mix.alpha_h,
    ];
    if let Some(r) = roots_with(p, EPS_CMP) {
        pts.push(r.lower);
        pts.push(r.upper);
    }
    pts
}

/// Attractor test: positive drift on `(z - eps, z)` and negative drift on
/// `(z, z + eps)`, each side sampled at 64 points. At `z = 0` or `z = 1` the
/// missing side is vacuous.
pub fn classify_attractor(z: f64, p: &GameParams, mix: &PopulationMix, eps: f64) -> bool {
    let cfg = SolverConfig {
        attractor_eps: eps,
        ..SolverConfig::default()
    };
    classify_attractor_with(p, mix, z, &critical_points(p, mix), &cfg)
}

pub fn classify_attractor_with<G: UtilityGap>(
    gap: &G,
    mix: &PopulationMix,
    z: f64,
    critical: &[f64],
    cfg: &SolverConfig,
) -> bool {
    let nearest = critical
        .iter()
        .map(|c| (c - z).abs())
        .filter(|d| *d > cfg.eps_cmp)
        .fold(f64::INFINITY, f64::min);
    let radius = cfg.attractor_eps.min(0.5 * nearest);
    let n = cfg.attractor_samples.max(1);
    let offsets = (1..=n).map(|i| radius * i as f64 / (n + 1) as f64);

    let check_left = z > cfg.eps_cmp;
    let check_right = z < 1.0 - cfg.eps_cmp;
    offsets.into_iter().all(|d| {
        let left_ok = !check_left || drift_with(gap, mix, z - d) > 0.0;
        let right_ok = !check_right || drift_with(gap, mix, z + d) < 0.0;
        left_ok && right_ok
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: f64, gap: f64) -> GameParams {
        GameParams::from_gap(m, gap).unwrap()
    }

    fn mix(r: f64, h: f64, l: f64) -> PopulationMix {
        PopulationMix::new(r, h, l).unwrap()
    }

    fn levels(points: &[EquilibriumPoint]) -> Vec<f64> {
        points.iter().map(|p| p.z_star).collect()
    }

    fn assert_levels(got: &[f64], want: &[f64]) {
        assert_eq!(got.len(), want.len(), "got {got:?}, want {want:?}");
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-9, "got {got:?}, want {want:?}");
        }
    }

    #[test]
    fn classical_sets() {
        assert_eq!(classical_ne_set(&params(2.0, 1.5)), vec![0.0]);
        assert_eq!(classical_ne_set(&params(2.0, 1.0)), vec![0.0, 0.5]);
        assert_levels(
            &classical_ne_set(&params(2.0, 0.5)),
            &[0.0, 0.1464466094067262, 0.8535533905932737],
        );
    }

    #[test]
    fn alpha_rne_examples() {
        let s = alpha_rne_set(&params(2.0, 1.5), &PopulationMix::two_type(0.4).unwrap()).unwrap();
        assert_levels(&levels(&s), &[0.0, 0.6]);
        let s = alpha_rne_set(&params(2.0, 0.5), &PopulationMix::two_type(0.1).unwrap()).unwrap();
        assert_levels(&levels(&s), &[0.0, 0.9]);
        let s = alpha_rne_set(&params(2.0, 0.5), &PopulationMix::two_type(0.4).unwrap()).unwrap();
        assert_levels(
            &levels(&s),
            &[0.0, 0.1464466094067262, 0.4, 0.8535533905932737],
        );
        assert!(alpha_rne_set(&params(2.0, 0.5), &mix(0.4, 0.3, 0.3)).is_err());
    }

    #[test]
    fn mt_amfe_examples() {
        for m in [mix(0.6, 0.4, 0.0), mix(0.1, 0.2, 0.7), mix(0.3, 0.5, 0.2)] {
            assert_eq!(mt_amfe_set(&params(2.0, 1.5), &m)[0].z_star, 0.0);
        }
        assert_levels(
            &levels(&mt_amfe_set(&params(2.0, 1.5), &mix(0.2, 0.6, 0.2))),
            &[0.0, 0.6],
        );
        // R- = (1 - sqrt(0.6))/2 is an indifference equilibrium (w = R-/0.4);
        // R+ needs alpha_H + alpha_R >= R+ and is absent.
        let lo = (1.0 - 0.6f64.sqrt()) / 2.0;
        assert_levels(
            &levels(&mt_amfe_set(&params(2.0, 0.4), &mix(0.4, 0.3, 0.3))),
            &[0.0, lo, 0.4, 0.7],
        );
        assert!(levels(&mt_amfe_set(&params(2.0, 1.0), &mix(0.6, 0.4, 0.0))).contains(&0.5));
    }

    #[test]
    fn points_satisfy_aggregation() {
        let p = params(2.0, 0.4);
        let m = mix(0.4, 0.3, 0.3);
        for pt in mt_amfe_set(&p, &m) {
            assert!((pt.aggregate(&m) - pt.z_star).abs() < 1e-9);
            assert_eq!(pt.mu_l, 0.0);
        }
    }

    #[test]
    fn drift_examples() {
        let p = params(2.0, 0.5);
        let m = mix(0.4, 0.3, 0.3);
        assert_eq!(drift(0.0, &p, &m).unwrap(), 0.0);
        assert!((drift(0.6, &p, &m).unwrap() - 0.1).abs() < 1e-12);
        assert!((drift(0.95, &p, &m).unwrap() + 0.65).abs() < 1e-12);
        assert!(drift(1.01, &p, &m).is_err());
    }

    #[test]
    fn attractor_examples() {
        let p = params(2.0, 0.5);
        let all_rational = mix(1.0, 0.0, 0.0);
        let r = game::roots(&p).unwrap();
        assert!(classify_attractor(
            0.0,
            &params(2.0, 1.5),
            &all_rational,
            1e-3
        ));
        assert!(classify_attractor(0.0, &p, &all_rational, 1e-3));
        assert!(!classify_attractor(r.lower, &p, &all_rational, 1e-3));
        assert!(classify_attractor(r.upper, &p, &all_rational, 1e-3));
    }

    #[test]
    fn knife_edge_half() {
        for gap in [1.0, 1.5] {
            let p = params(2.0, gap);
            let m = mix(0.2, 0.5, 0.3);
            assert!(levels(&mt_amfe_set(&p, &m)).contains(&0.5));
            assert!(!classify_attractor(0.5, &p, &m, 1e-3));
        }
    }

    #[test]
    fn dedup_keeps_first() {
        assert_eq!(
            dedup_levels(&[0.3, 0.1, 0.3 + 1e-12, 0.2], 1e-9),
            vec![0.1, 0.2, 0.3]
        );
    }
}
