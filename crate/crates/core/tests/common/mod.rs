//! Test-side oracles written directly from the model definitions, sharing no
//! code with the library's solvers.
#![allow(dead_code)]

use popgame::{GameParams, PopulationMix};
use rand::Rng;

#[derive(Debug, Clone, Copy)]
pub struct Draw {
    pub m: f64,
    pub gap: f64,
    pub r: f64,
    pub h: f64,
    pub l: f64,
}

impl Draw {
    pub fn params(&self) -> GameParams {
        GameParams::from_gap(self.m, self.gap).unwrap()
    }

    pub fn mix(&self) -> PopulationMix {
        PopulationMix::new(self.r, self.h, self.l).unwrap()
    }

    pub fn h_at(&self, z: f64) -> f64 {
        2.0 * (1.0 - z) * z * self.m - self.gap
    }

    /// Roots by the quadratic formula on `2 m z^2 - 2 m z + gap = 0`.
    pub fn roots(&self) -> Option<(f64, f64)> {
        let (a, b, c) = (2.0 * self.m, -2.0 * self.m, self.gap);
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        let s = disc.sqrt();
        Some(((-b - s) / (2.0 * a), (-b + s) / (2.0 * a)))
    }

    pub fn drift(&self, z: f64) -> f64 {
        let rational = if self.h_at(z) >= 0.0 { self.r } else { 0.0 };
        let herding = if z >= 0.5 { self.h } else { 0.0 };
        rational + herding - z
    }

    pub fn critical(&self) -> Vec<f64> {
        let mut c = vec![0.0, 0.5, 1.0, self.r, self.h, self.r + self.h];
        if let Some((lo, hi)) = self.roots() {
            c.push(lo);
            c.push(hi);
        }
        c
    }

    /// Minimum distance between distinct critical points (ignoring exact
    /// coincidences such as alpha_L = 0 making alpha_R + alpha_H = 1).
    pub fn separation(&self) -> f64 {
        let c = self.critical();
        let mut best = f64::INFINITY;
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                let d = (c[i] - c[j]).abs();
                if d > 1e-15 {
                    best = best.min(d);
                }
            }
        }
        best
    }

    fn is_equilibrium(&self, z: f64) -> bool {
        let tol = 1e-9;
        let herd = if z >= 0.5 { self.h } else { 0.0 };
        let rational_mass = z - herd;
        if self.r <= tol {
            return rational_mass.abs() <= tol;
        }
        let w = rational_mass / self.r;
        if w < -tol || w > 1.0 + tol {
            return false;
        }
        let g = self.h_at(z);
        if w <= tol {
            g <= tol
        } else if w >= 1.0 - tol {
            g >= -tol
        } else {
            g.abs() <= tol
        }
    }

    pub fn equilibria(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for z in self.critical() {
            if (0.0..=1.0).contains(&z)
                && self.is_equilibrium(z)
                && !out.iter().any(|o| (o - z).abs() <= 1e-9)
            {
                out.push(z);
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// Drift-sign check with offsets far below the critical-point separation.
    pub fn is_attractor(&self, z: f64) -> bool {
        let reach = (self.separation() * 0.25).min(1e-4);
        let offsets = [reach, reach * 0.5, reach * 0.1, reach * 0.01];
        let left = z <= 0.0 || offsets.iter().all(|d| self.drift(z - d) > 0.0);
        let right = z >= 1.0 || offsets.iter().all(|d| self.drift(z + d) < 0.0);
        left && right
    }

    pub fn stable(&self) -> Vec<f64> {
        self.equilibria()
            .into_iter()
            .filter(|z| self.is_attractor(*z))
            .collect()
    }
}

/// Random parameters: morality in [0.5, 5], gap in (0, m), and a mix drawn
/// uniformly from the simplex (or from the two-type edge).
pub fn random_draw<R: Rng>(rng: &mut R, two_type: bool) -> Draw {
    let m = rng.gen_range(0.5..5.0);
    let gap = rng.gen_range(0.0f64..m).max(1e-6);
    let (r, h, l) = if two_type {
        let r = rng.gen::<f64>();
        (r, 1.0 - r, 0.0)
    } else {
        let mut u = [rng.gen::<f64>(), rng.gen::<f64>()];
        u.sort_by(f64::total_cmp);
        let r = u[0];
        let h = u[1] - u[0];
        (r, h, 1.0 - r - h)
    };
    Draw { m, gap, r, h, l }
}

pub fn same_levels(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}
