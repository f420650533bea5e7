use std::path::PathBuf;

use popgame::dynamics::{
    classify_phase_line, integrate_replicator_detailed, monte_carlo, simulate, SimConfig,
    Trajectory,
};
use popgame::environment::{
    env_cost, group_argmax_maps, integrate_co2, verify_invariance, InvarianceReport,
};
use popgame::equilibria::{mt_amfe_set, stable_set, EquilibriumPoint};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{EnvSection, Format, RunConfig};
use crate::output::{fmt_f64, Csv, RunManifest, Writer};
use crate::sweep::{run_sweep, SweepRow};
use crate::{CliError, Command};

pub fn dispatch(cmd: Command, cfg: &RunConfig, strict: bool) -> Result<Vec<PathBuf>, CliError> {
    log::debug!("running {} with {}", cmd.name(), cfg.canonical());
    match cmd {
        Command::Equilibria => equilibria(cfg, false),
        Command::StableSet => equilibria(cfg, true),
        Command::Simulate => cmd_simulate(cfg),
        Command::MonteCarlo => cmd_monte_carlo(cfg, strict),
        Command::Replicator => cmd_replicator(cfg),
        Command::EnvIntegrate => cmd_env_integrate(cfg),
        Command::EnvVerify => cmd_env_verify(cfg, strict),
        Command::Sweep => cmd_sweep(cfg),
    }
}

fn manifest(cmd: Command, cfg: &RunConfig, seeds: Vec<u64>) -> RunManifest {
    RunManifest::start(cmd.name(), cfg.canonical(), seeds)
}

fn require<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    section
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("this command needs a [{name}] section")))
}

#[derive(Serialize)]
struct EquilibriumRow<'a> {
    z_star: f64,
    mu_r: f64,
    mu_h: f64,
    mu_l: f64,
    stable: bool,
    regime_label: &'a str,
}

fn equilibria(cfg: &RunConfig, stable_only: bool) -> Result<Vec<PathBuf>, CliError> {
    let (cmd, name) = if stable_only {
        (Command::StableSet, "stable_set")
    } else {
        (Command::Equilibria, "equilibria")
    };
    let stable = stable_set(&cfg.game, &cfg.mix)?;
    let levels = stable.levels();
    let points: Vec<EquilibriumPoint> = if stable_only {
        stable.points.clone()
    } else {
        mt_amfe_set(&cfg.game, &cfg.mix)
    };
    let rows: Vec<EquilibriumRow> = points
        .iter()
        .map(|e| EquilibriumRow {
            z_star: e.z_star,
            mu_r: e.mu_r,
            mu_h: e.mu_h,
            mu_l: e.mu_l,
            stable: levels
                .iter()
                .any(|z| (z - e.z_star).abs() <= popgame::EPS_CMP),
            regime_label: &stable.regime_label,
        })
        .collect();

    let mut w = Writer::new(&cfg.output.dir)?;
    let file = format!("{name}.{}", cfg.output.format.ext());
    match cfg.output.format {
        Format::Json => w.write_json(&file, &rows)?,
        Format::Csv => {
            let mut csv = Csv::new(&["z_star", "mu_r", "mu_h", "mu_l", "stable", "regime_label"]);
            for r in &rows {
                csv.row([
                    fmt_f64(r.z_star),
                    fmt_f64(r.mu_r),
                    fmt_f64(r.mu_h),
                    fmt_f64(r.mu_l),
                    r.stable.to_string(),
                    r.regime_label.to_string(),
                ]);
            }
            w.write(&file, &csv.into_string())?;
        }
    }
    w.finish(manifest(cmd, cfg, vec![]))
}

fn trajectory_csv(t: &Trajectory, at: &str, extra: Option<(&str, f64)>) -> String {
    let mut header = vec![at, "z"];
    if let Some((name, _)) = extra {
        header = vec![at, "z", name];
    }
    let mut csv = Csv::new(&header);
    for s in &t.samples {
        match extra {
            None => csv.row([fmt_f64(s.at), fmt_f64(s.value)]),
            // CO2 trajectories carry c as the state at a fixed z.
            Some((_, z)) => csv.row([fmt_f64(s.at), fmt_f64(z), fmt_f64(s.value)]),
        }
    }
    csv.into_string()
}

fn cmd_simulate(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let sim = require(&cfg.sim, "sim")?;
    let t = simulate(sim, &cfg.game, &cfg.mix)?;
    let mut w = Writer::new(&cfg.output.dir)?;
    w.write("trajectory.csv", &trajectory_csv(&t, "k", None))?;
    w.finish(manifest(Command::Simulate, cfg, vec![sim.seed]))
}

fn cmd_monte_carlo(cfg: &RunConfig, strict: bool) -> Result<Vec<PathBuf>, CliError> {
    let sim: &SimConfig = require(&cfg.sim, "sim")?;
    let mc = require(&cfg.montecarlo, "montecarlo")?;
    let report = monte_carlo(sim, mc.runs, &cfg.game, &cfg.mix, mc.initial, mc.tolerance)?;
    let mut w = Writer::new(&cfg.output.dir)?;
    w.write_json("report.json", &report)?;
    let mut seeds = vec![sim.seed];
    seeds.extend(report.outcomes.iter().map(|o| o.seed));
    let files = w.finish(manifest(Command::MonteCarlo, cfg, seeds))?;
    if report.unmatched > 0 {
        let msg = format!(
            "{} of {} runs unmatched ({} unsettled)",
            report.unmatched, report.runs, report.unsettled
        );
        if strict {
            return Err(CliError::NonConvergence(msg));
        }
        log::warn!("{msg}");
    }
    Ok(files)
}

#[derive(Serialize)]
struct PhaseRow {
    z_star: f64,
    stable: bool,
    semi_stable: bool,
    slope: f64,
}

fn cmd_replicator(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let r = require(&cfg.replicator, "replicator")?;
    let run = integrate_replicator_detailed(r.z0, &cfg.game, r.t_end, r.dt)?;
    if run.max_excursion > 0.0 {
        log::warn!("clamped a state by {:e}", run.max_excursion);
    }
    let phase = classify_phase_line(&cfg.game);
    let mut w = Writer::new(&cfg.output.dir)?;
    w.write(
        "trajectory.csv",
        &trajectory_csv(&run.trajectory, "t", None),
    )?;
    let file = format!("phase_line.{}", cfg.output.format.ext());
    match cfg.output.format {
        Format::Json => {
            let rows: Vec<PhaseRow> = phase
                .iter()
                .map(|p| PhaseRow {
                    z_star: p.z_star,
                    stable: p.stable,
                    semi_stable: p.semi_stable,
                    slope: p.slope,
                })
                .collect();
            w.write_json(&file, &rows)?
        }
        Format::Csv => {
            let mut csv = Csv::new(&["z_star", "stable", "semi_stable", "slope"]);
            for p in &phase {
                csv.row([
                    fmt_f64(p.z_star),
                    p.stable.to_string(),
                    p.semi_stable.to_string(),
                    fmt_f64(p.slope),
                ]);
            }
            w.write(&file, &csv.into_string())?;
        }
    }
    w.finish(manifest(Command::Replicator, cfg, vec![]))
}

fn cost_table(env: &EnvSection) -> Result<Vec<(f64, f64)>, CliError> {
    let n = env.cost_points.max(2);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let z = i as f64 / (n - 1) as f64;
            Ok((z, env_cost(&env.model, &env.cost, z, env.dt)?))
        })
        .collect()
}

fn cmd_env_integrate(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let env = require(&cfg.env, "env")?;
    let t = integrate_co2(&env.model, env.z, env.dt)?;
    let costs = cost_table(env)?;
    let mut w = Writer::new(&cfg.output.dir)?;
    w.write(
        "trajectory.csv",
        &trajectory_csv(&t, "t", Some(("c", env.z))),
    )?;
    let file = format!("cost.{}", cfg.output.format.ext());
    match cfg.output.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                z: f64,
                e: f64,
            }
            let rows: Vec<Row> = costs.iter().map(|&(z, e)| Row { z, e }).collect();
            w.write_json(&file, &rows)?;
        }
        Format::Csv => {
            let mut csv = Csv::new(&["z", "e"]);
            for (z, e) in &costs {
                csv.row([fmt_f64(*z), fmt_f64(*e)]);
            }
            w.write(&file, &csv.into_string())?;
        }
    }
    w.finish(manifest(Command::EnvIntegrate, cfg, vec![]))
}

#[derive(Debug, Serialize)]
struct EnvVerifyReport {
    invariance: InvarianceReport,
    groups: Vec<f64>,
    group_maps_identical: bool,
    passed: bool,
}

fn cmd_env_verify(cfg: &RunConfig, strict: bool) -> Result<Vec<PathBuf>, CliError> {
    let env = require(&cfg.env, "env")?;
    let invariance = verify_invariance(
        &cfg.game, &cfg.mix, &env.model, &env.cost, env.grid_n, env.dt,
    )?;
    let group_maps_identical = if env.groups.len() < 2 {
        true
    } else {
        let zs: Vec<f64> = (0..env.grid_n)
            .map(|i| i as f64 / (env.grid_n - 1) as f64)
            .collect();
        let es = zs
            .par_iter()
            .map(|z| env_cost(&env.model, &env.cost, *z, env.dt))
            .collect::<popgame::Result<Vec<f64>>>()?;
        let maps = group_argmax_maps(&cfg.game, &env.groups, &zs, &es)?;
        maps.windows(2).all(|w| w[0] == w[1])
    };
    let passed = invariance.passed() && group_maps_identical;
    let report = EnvVerifyReport {
        invariance,
        groups: env.groups.clone(),
        group_maps_identical,
        passed,
    };
    let mut w = Writer::new(&cfg.output.dir)?;
    w.write_json("report.json", &report)?;
    let files = w.finish(manifest(Command::EnvVerify, cfg, vec![]))?;
    if !passed {
        let msg = format!("environment check failed: {report:?}");
        if strict {
            return Err(CliError::NonConvergence(msg));
        }
        log::warn!("{msg}");
    }
    Ok(files)
}

fn cmd_sweep(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let sweep = require(&cfg.sweep, "sweep")?;
    let rows: Vec<SweepRow> = run_sweep(&cfg.game, &cfg.mix, &sweep.axes, sweep.exact)?;
    let ambiguous = rows
        .iter()
        .filter(|r| r.regime_label.starts_with("ambiguous"))
        .count();
    if ambiguous > 0 {
        log::warn!("{ambiguous} sweep points lie on a regime boundary");
    }
    let mut w = Writer::new(&cfg.output.dir)?;
    let file = format!("sweep.{}", cfg.output.format.ext());
    match cfg.output.format {
        Format::Json => w.write_json(&file, &rows)?,
        Format::Csv => {
            let mut header: Vec<&str> = sweep.axes.iter().map(|a| a.param.name()).collect();
            header.extend(["stable_set", "regime_label"]);
            let mut csv = Csv::new(&header);
            for r in &rows {
                let set: Vec<String> = r.stable_set.iter().map(|z| fmt_f64(*z)).collect();
                csv.row(
                    r.coords
                        .iter()
                        .map(|(_, v)| fmt_f64(*v))
                        .chain([set.join(";"), r.regime_label.clone()]),
                );
            }
            w.write(&file, &csv.into_string())?;
        }
    }
    w.finish(manifest(Command::Sweep, cfg, vec![]))
}
