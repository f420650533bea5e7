//! Brute-force equilibrium search, independent of the closed-form case analysis.

use super::{
    classify_attractor_with, dedup_levels, EquilibriumPoint, Provenance, SolverConfig, UtilityGap,
};
use crate::game::{roots_with, GameParams, PopulationMix};
use crate::{Error, Result};

/// Scans a uniform grid plus the known candidate levels and keeps every `z`
/// that solves the fixed-point condition with a best-response rational share.
pub fn brute_force_equilibria(
    p: &GameParams,
    mix: &PopulationMix,
    grid_n: usize,
) -> Result<Vec<EquilibriumPoint>> {
    if grid_n < 1000 {
        return Err(Error::InvalidConfig(format!(
            "brute-force grid needs at least 1000 points, got {grid_n}"
        )));
    }
    let cfg = SolverConfig {
        grid_n,
        ..SolverConfig::default()
    };
    let mut candidates = base_candidates(mix);
    if let Some(r) = roots_with(p, cfg.eps_cmp) {
        candidates.push(r.lower);
        candidates.push(r.upper);
    }
    let critical = with_unit_ends(&candidates);
    candidates.extend((0..=grid_n).map(|i| i as f64 / grid_n as f64));

    Ok(fixed_points_with(p, mix, &candidates, cfg.eps_cmp)
        .into_iter()
        .map(|z| {
            let mut pt = EquilibriumPoint::at(z, p, mix, cfg.eps_cmp, Provenance::BruteForce);
            pt.stable = classify_attractor_with(p, mix, z, &critical, &cfg);
            pt
        })
        .collect())
}

/// Equilibria for an arbitrary utility difference. Roots are located by a
/// sign scan on `cfg.grid_n` cells refined by bisection, so nothing about the
/// quadratic form of the utility difference is assumed.
pub fn numeric_equilibria<G: UtilityGap>(
    gap: &G,
    mix: &PopulationMix,
    cfg: &SolverConfig,
) -> Vec<EquilibriumPoint> {
    let mut candidates = base_candidates(mix);
    candidates.extend(numeric_roots(gap, cfg.grid_n));
    let critical = with_unit_ends(&candidates);
    fixed_points_with(gap, mix, &candidates, cfg.eps_cmp)
        .into_iter()
        .map(|z| {
            let mut pt = EquilibriumPoint::at(z, gap, mix, cfg.eps_cmp, Provenance::BruteForce);
            pt.stable = classify_attractor_with(gap, mix, z, &critical, cfg);
            pt
        })
        .collect()
}

/// Zeros of `gap` on [0, 1] found by sign changes over `cells` uniform cells.
pub fn numeric_roots<G: UtilityGap>(gap: &G, cells: usize) -> Vec<f64> {
    let cells = cells.max(1);
    let mut out = Vec::new();
    let mut prev_z = 0.0;
    let mut prev_g = gap.gap(0.0);
    if prev_g == 0.0 {
        out.push(0.0);
    }
    for i in 1..=cells {
        let z = i as f64 / cells as f64;
        let g = gap.gap(z);
        if g == 0.0 {
            out.push(z);
        } else if prev_g != 0.0 && (g > 0.0) != (prev_g > 0.0) {
            out.push(bisect(gap, prev_z, z, prev_g));
        }
        prev_z = z;
        prev_g = g;
    }
    out
}

fn bisect<G: UtilityGap>(gap: &G, mut lo: f64, mut hi: f64, g_lo: f64) -> f64 {
    let lo_positive = g_lo > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = gap.gap(mid);
        if g == 0.0 {
            return mid;
        }
        if (g > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn base_candidates(mix: &PopulationMix) -> Vec<f64> {
    vec![
        0.0,
        mix.alpha_h,
        mix.alpha_r,
        mix.alpha_r + mix.alpha_h,
        0.5,
    ]
}

fn with_unit_ends(candidates: &[f64]) -> Vec<f64> {
    let mut c = candidates.to_vec();
    c.extend([0.0, 1.0]);
    c
}

/// Keeps candidates `z` for which `w = (z - alpha_H 1{z >= 1/2}) / alpha_R`
/// lies in [0, 1] and every action in the support of `w` is a best response
/// at `z`. Returns levels sorted and deduplicated within `eps`.
pub fn fixed_points_with<G: UtilityGap>(
    gap: &G,
    mix: &PopulationMix,
    candidates: &[f64],
    eps: f64,
) -> Vec<f64> {
    let accepted: Vec<f64> = candidates
        .iter()
        .copied()
        .filter(|z| (0.0..=1.0).contains(z))
        .filter(|&z| is_fixed_point(gap, mix, z, eps))
        .collect();
    dedup_levels(&accepted, eps)
}

fn is_fixed_point<G: UtilityGap>(gap: &G, mix: &PopulationMix, z: f64, eps: f64) -> bool {
    let herding = if z >= 0.5 { mix.alpha_h } else { 0.0 };
    let rational_mass = z - herding;
    if mix.alpha_r <= eps {
        return rational_mass.abs() <= eps;
    }
    let w = rational_mass / mix.alpha_r;
    if w < -eps || w > 1.0 + eps {
        return false;
    }
    let g = gap.gap(z);
    let clean_is_best = g >= -eps;
    let unclean_is_best = g <= eps;
    if w <= eps {
        unclean_is_best
    } else if w >= 1.0 - eps {
        clean_is_best
    } else {
        clean_is_best && unclean_is_best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_grid() {
        let p = GameParams::from_gap(2.0, 0.5).unwrap();
        let m = PopulationMix::two_type(0.5).unwrap();
        assert!(brute_force_equilibria(&p, &m, 999).is_err());
    }

    #[test]
    fn oracle_examples() {
        let p = GameParams::from_gap(2.0, 1.5).unwrap();
        let m = PopulationMix::new(0.6, 0.3, 0.1).unwrap();
        let pts = brute_force_equilibria(&p, &m, 10_000).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].z_star, 0.0);

        let p = GameParams::from_gap(2.0, 1.0).unwrap();
        let m = PopulationMix::new(0.6, 0.4, 0.0).unwrap();
        let pts = brute_force_equilibria(&p, &m, 10_000).unwrap();
        assert!(pts.iter().any(|pt| pt.z_star == 0.5));
    }

    #[test]
    fn numeric_roots_match_closed_form() {
        let p = GameParams::from_gap(2.0, 0.5).unwrap();
        let r = crate::game::roots(&p).unwrap();
        let found = numeric_roots(&p, 1000);
        assert_eq!(found.len(), 2);
        assert!((found[0] - r.lower).abs() < 1e-14);
        assert!((found[1] - r.upper).abs() < 1e-14);
    }
}
