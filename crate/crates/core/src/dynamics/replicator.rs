//! Replicator flow `dz/dt = z (1 - z) h(z)` and its phase line.
//!
//! The utility difference is positive on `(R-, R+)`, so the flow pushes
//! states in that interval up toward `R+`: `R+` attracts and `R-` repels.
//! Stability here is read off the sampled sign of the vector field rather
//! than asserted from the derivative, so a double root at 1/2 comes out as
//! semi-stable.

use serde::{Deserialize, Serialize};

use super::{Sample, Trajectory, TrajectoryKind};
use crate::game::{check_unit, roots, utility_difference_unchecked, GameParams};
use crate::ode;
use crate::{Error, Result};

/// Radius of the one-sided neighborhoods probed by [`classify_phase_line`].
pub const PHASE_RADIUS: f64 = 1e-4;
/// Step of the central difference reported alongside each stationary point.
pub const FD_STEP: f64 = 1e-6;
const PHASE_SAMPLES: usize = 16;

pub fn replicator_rhs(z: f64, p: &GameParams) -> Result<f64> {
    check_unit("z", z)?;
    Ok(field(z, p))
}

fn field(z: f64, p: &GameParams) -> f64 {
    z * (1.0 - z) * utility_difference_unchecked(z, p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicatorRun {
    pub trajectory: Trajectory,
    /// Largest distance any raw RK4 state fell outside [0, 1] before clamping.
    pub max_excursion: f64,
}

pub fn integrate_replicator(z0: f64, p: &GameParams, t_end: f64, dt: f64) -> Result<Trajectory> {
    integrate_replicator_detailed(z0, p, t_end, dt).map(|r| r.trajectory)
}

/// Fixed-step RK4 on `[0, t_end]`; states are clamped to [0, 1] after each
/// step and the size of any clamp is reported.
pub fn integrate_replicator_detailed(
    z0: f64,
    p: &GameParams,
    t_end: f64,
    dt: f64,
) -> Result<ReplicatorRun> {
    check_unit("z0", z0)?;
    if !(dt > 0.0 && t_end > 0.0 && dt <= t_end) {
        return Err(Error::StepSize { dt, t_end });
    }
    let ts = ode::time_grid(t_end, dt);
    let mut max_excursion: f64 = 0.0;
    let zs = ode::integrate_on_grid(&|_, z| field(z, p), &ts, z0, |z| {
        let clamped = z.clamp(0.0, 1.0);
        max_excursion = max_excursion.max((z - clamped).abs());
        clamped
    });
    Ok(ReplicatorRun {
        trajectory: Trajectory {
            kind: TrajectoryKind::Replicator,
            seed: None,
            samples: ts
                .into_iter()
                .zip(zs)
                .map(|(at, value)| Sample { at, value })
                .collect(),
        },
        max_excursion,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub z_star: f64,
    pub stable: bool,
    /// Attracting from one side and repelling from the other.
    pub semi_stable: bool,
    /// Central finite difference of the vector field at `z_star`.
    pub slope: f64,
}

/// Stationary points `{0, 1}` and the interior roots, each classified by the
/// sign of the field on one-sided punctured neighborhoods.
pub fn classify_phase_line(p: &GameParams) -> Vec<PhasePoint> {
    let mut points = vec![0.0];
    if let Some(r) = roots(p) {
        points.push(r.lower);
        if !r.is_double() {
            points.push(r.upper);
        }
    }
    points.push(1.0);

    points
        .into_iter()
        .map(|z| {
            let offsets: Vec<f64> = (1..=PHASE_SAMPLES)
                .map(|i| PHASE_RADIUS * i as f64 / PHASE_SAMPLES as f64)
                .collect();
            let side = |sign: f64| -> Option<f64> {
                let vals: Vec<f64> = offsets.iter().map(|d| field(z + sign * d, p)).collect();
                if vals.iter().all(|v| *v > 0.0) {
                    Some(1.0)
                } else if vals.iter().all(|v| *v < 0.0) {
                    Some(-1.0)
                } else {
                    None
                }
            };
            // The flow points at z from the left when the field is positive
            // there, and from the right when it is negative.
            let has_left = z > 0.0;
            let has_right = z < 1.0;
            let left_in = has_left && side(-1.0) == Some(1.0);
            let right_in = has_right && side(1.0) == Some(-1.0);
            let stable = (!has_left || left_in) && (!has_right || right_in);
            let semi_stable = has_left && has_right && !stable && (left_in || right_in);
            let slope = (field(z + FD_STEP, p) - field(z - FD_STEP, p)) / (2.0 * FD_STEP);
            PhasePoint {
                z_star: z,
                stable,
                semi_stable,
                slope,
            }
        })
        .collect()
}
