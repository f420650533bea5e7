//! Browser bindings for the demo page in `www/`.
//!
//! Each export takes plain numbers and returns a JSON string, so the page
//! needs no generated type glue. Errors come back as `{"error": "..."}`.

use popgame::dynamics::{classify_phase_line, integrate_replicator, simulate, SimConfig};
use popgame::equilibria::{drift, mt_amfe_set, stable_set};
use popgame::game::{roots, utility_difference};
use popgame::{Error, GameParams, PopulationMix};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Points on the drift and utility-difference curves.
const CURVE_POINTS: usize = 401;
/// Most samples a trajectory sends back to the page.
const MAX_SAMPLES: u64 = 2000;

fn setup(
    morality: f64,
    price_gap: f64,
    alpha_r: f64,
    alpha_h: f64,
) -> Result<(GameParams, PopulationMix), Error> {
    let p = GameParams::from_gap(morality, price_gap)?;
    let alpha_l = 1.0 - alpha_r - alpha_h;
    if alpha_l < -1e-12 {
        return Err(Error::InvalidMix(format!(
            "alpha_R + alpha_H = {} exceeds 1",
            alpha_r + alpha_h
        )));
    }
    let mix = PopulationMix::new(alpha_r, alpha_h, alpha_l.max(0.0))?;
    Ok((p, mix))
}

fn respond<T: Serialize>(r: Result<T, Error>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).expect("result serializes"),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

/// Equilibria, stable set, regime label and the drift curve `M(z)`.
#[wasm_bindgen]
pub fn analyze(morality: f64, price_gap: f64, alpha_r: f64, alpha_h: f64) -> String {
    respond(
        setup(morality, price_gap, alpha_r, alpha_h).map(|(p, mix)| {
            let (stable, label) = match stable_set(&p, &mix) {
                Ok(s) => (s.levels(), s.regime_label),
                Err(Error::RegimeAmbiguity { boundary }) => {
                    (vec![], format!("on a regime boundary ({boundary})"))
                }
                Err(e) => (vec![], e.to_string()),
            };
            let zs: Vec<f64> = (0..CURVE_POINTS)
                .map(|i| i as f64 / (CURVE_POINTS - 1) as f64)
                .collect();
            json!({
                "equilibria": mt_amfe_set(&p, &mix).iter().map(|e| e.z_star).collect::<Vec<_>>(),
                "stable": stable,
                "regime": label,
                "roots": roots(&p).map(|r| vec![r.lower, r.upper]).unwrap_or_default(),
                "z": zs,
                "drift": zs.iter().map(|z| drift(*z, &p, &mix).unwrap()).collect::<Vec<_>>(),
                "h": zs.iter().map(|z| utility_difference(*z, &p).unwrap()).collect::<Vec<_>>(),
            })
        }),
    )
}

/// One turn-by-turn run, thinned to at most [`MAX_SAMPLES`] points.
#[wasm_bindgen]
pub fn simulate_run(
    morality: f64,
    price_gap: f64,
    alpha_r: f64,
    alpha_h: f64,
    z0: f64,
    steps: u32,
    seed: u32,
) -> String {
    respond(
        setup(morality, price_gap, alpha_r, alpha_h).and_then(|(p, mix)| {
            let steps = u64::from(steps);
            let cfg = SimConfig {
                steps,
                z0,
                record_every: (steps / MAX_SAMPLES).max(1),
                seed: u64::from(seed),
                start_index: 1,
            };
            let t = simulate(&cfg, &p, &mix)?;
            Ok(json!({
                "k": t.samples.iter().map(|s| s.at).collect::<Vec<_>>(),
                "z": t.samples.iter().map(|s| s.value).collect::<Vec<_>>(),
            }))
        }),
    )
}

/// Replicator phase line plus one trajectory from `z0`.
#[wasm_bindgen]
pub fn replicator(morality: f64, price_gap: f64, z0: f64, t_end: f64) -> String {
    respond(GameParams::from_gap(morality, price_gap).and_then(|p| {
        let t = integrate_replicator(z0, &p, t_end, 0.01)?;
        let every = (t.samples.len() / MAX_SAMPLES as usize).max(1);
        let thinned: Vec<_> = t.samples.iter().step_by(every).collect();
        Ok(json!({
            "phase": classify_phase_line(&p),
            "t": thinned.iter().map(|s| s.at).collect::<Vec<_>>(),
            "z": thinned.iter().map(|s| s.value).collect::<Vec<_>>(),
        }))
    }))
}
