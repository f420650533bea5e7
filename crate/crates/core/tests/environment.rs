mod common;

use common::random_draw;
use popgame::environment::{
    env_cost, group_argmax_maps, integrate_co2, utility_difference_group, utility_rational_env,
    verify_invariance, CostFunctional, CostKind, Discomfort, DriftModel, EnvModel, TabulatedDrift,
};
use popgame::game::utility_difference;
use popgame::{Action, GameParams, PopulationMix};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_linear(rng: &mut StdRng, horizon: f64) -> EnvModel {
    EnvModel::linear(
        rng.gen_range(0.0..3.0),
        rng.gen_range(0.0..3.0),
        rng.gen_range(0.5..5.0),
        rng.gen_range(0.1..2.0),
        rng.gen_range(0.1..10.0),
        Some(horizon),
    )
    .unwrap()
}

fn zgrid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

#[test]
fn drift_is_non_increasing_in_adoption() {
    let mut rng = StdRng::seed_from_u64(1);
    for _ in 0..50 {
        let m = random_linear(&mut rng, 10.0);
        for c in [0.1, 1.0, 5.0, 20.0] {
            let f: Vec<f64> = zgrid(101).iter().map(|z| m.drift(c, *z)).collect();
            assert!(f.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}

#[test]
fn comparison_principle_on_linear_model() {
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..30 {
        let m = random_linear(&mut rng, 20.0);
        let (z1, z2) = (0.2, 0.8);
        let a = integrate_co2(&m, z1, 0.01).unwrap();
        let b = integrate_co2(&m, z2, 0.01).unwrap();
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert!(x.value >= y.value - 1e-12);
        }
    }
}

#[test]
fn cost_is_non_increasing_for_both_functionals() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..20 {
        let m = random_linear(&mut rng, 15.0);
        for kind in [CostKind::TimeAverage, CostKind::LongRunLimit] {
            for phi in [
                Discomfort::Identity,
                Discomfort::Quadratic,
                Discomfort::Excess { threshold: 1.0 },
            ] {
                let cf = CostFunctional { kind, phi };
                let e: Vec<f64> = zgrid(21)
                    .iter()
                    .map(|z| env_cost(&m, &cf, *z, 0.01).unwrap())
                    .collect();
                assert!(
                    e.windows(2).all(|w| w[0] >= w[1] - 1e-12),
                    "{kind:?} {phi:?}: {e:?}"
                );
            }
        }
    }
}

#[test]
fn rk4_tracks_closed_form() {
    let mut rng = StdRng::seed_from_u64(4);
    for _ in 0..30 {
        let base = random_linear(&mut rng, 1.0);
        let gamma0 = match base.drift {
            DriftModel::LinearMisra { gamma0, .. } => gamma0,
            _ => unreachable!(),
        };
        let m = EnvModel {
            horizon: Some(10.0 / gamma0),
            ..base
        };
        for z in [0.0, 0.5, 1.0] {
            let t = integrate_co2(&m, z, 0.01).unwrap();
            for s in &t.samples {
                let exact = m.closed_form(s.at, z).unwrap();
                assert!(((s.value - exact) / exact).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn tabulated_long_run_limit_settles() {
    // f(c; z) = 3 - z - c on a coarse grid; bilinear interpolation is exact.
    let c_grid = vec![0.0, 5.0, 10.0];
    let z_grid = vec![0.0, 1.0];
    let values = c_grid
        .iter()
        .map(|c| z_grid.iter().map(|z| 3.0 - z - c).collect())
        .collect();
    let m = EnvModel {
        drift: DriftModel::CustomTabulated(TabulatedDrift {
            c_grid,
            z_grid,
            values,
            settle_cap: 200.0,
        }),
        c0: 1.0,
        horizon: None,
    };
    let cf = CostFunctional {
        kind: CostKind::LongRunLimit,
        phi: Discomfort::Identity,
    };
    assert!((env_cost(&m, &cf, 0.0, 0.01).unwrap() - 3.0).abs() < 1e-6);
    assert!((env_cost(&m, &cf, 1.0, 0.01).unwrap() - 2.0).abs() < 1e-6);
}

#[test]
fn penalty_cancels_exactly() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..200 {
        let d = random_draw(&mut rng, false);
        let rho = 10f64.powf(rng.gen_range(-3.0..3.0));
        let p = d.params().with_env_weight(rho).unwrap();
        let e = rng.gen_range(0.0..1e4);
        for z in zgrid(51) {
            let diff = utility_rational_env(Action::Clean, z, &p, e).unwrap()
                - utility_rational_env(Action::Unclean, z, &p, e).unwrap();
            let h = utility_difference(z, &p).unwrap();
            // Formed from two large utilities, so only relative agreement holds here.
            assert!((diff - h).abs() <= 1e-12 * (1.0 + rho * e));
            assert_eq!(utility_difference_group(z, &p, rho, e).unwrap(), h);
        }
    }
}

#[test]
fn group_maps_agree() {
    let p = GameParams::from_gap(2.0, 0.5).unwrap();
    let zs = zgrid(1000);
    let m = EnvModel::linear(1.0, 1.0, 1.0, 0.5, 1.0, Some(10.0)).unwrap();
    let cf = CostFunctional::default();
    let e: Vec<f64> = zs
        .iter()
        .map(|z| env_cost(&m, &cf, *z, 0.05).unwrap())
        .collect();
    let maps = group_argmax_maps(&p, &[0.0, 0.1, 1.0, 10.0, 100.0], &zs, &e).unwrap();
    assert!(maps.windows(2).all(|w| w[0] == w[1]));
    assert!(maps[0].contains(&Action::Clean) && maps[0].contains(&Action::Unclean));
}

#[test]
fn invariance_with_steep_costs() {
    let m = EnvModel::linear(2.0, 3.0, 4.0, 0.5, 1.0, Some(5.0)).unwrap();
    let cf = CostFunctional {
        kind: CostKind::TimeAverage,
        phi: Discomfort::Quadratic,
    };
    for (mix, gap) in [
        (PopulationMix::new(0.4, 0.3, 0.3).unwrap(), 0.4),
        (PopulationMix::two_type(0.3).unwrap(), 0.5),
        (PopulationMix::two_type(0.6).unwrap(), 1.5),
    ] {
        let p = GameParams::from_gap(2.0, gap)
            .unwrap()
            .with_env_weight(1e3)
            .unwrap();
        let r = verify_invariance(&p, &mix, &m, &cf, 200, 0.05).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.max_deviation, 0.0);
    }
}
