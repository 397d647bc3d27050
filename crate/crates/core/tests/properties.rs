use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;

use vcsra::analytic::{p_av_single, AnalyticParams};
use vcsra::beamforming::{orthogonal_complement, BeamformerKind};
use vcsra::channel::{ChannelModel, ModelTag};
use vcsra::config::ScenarioConfig;
use vcsra::montecarlo::{
    estimate_p_av, estimate_rate_grid, rate_thresholds, simulate, supported_ra_count, sweep,
    AvailabilitySamples, Execution, SweepAxis, PRACTICAL_THRESHOLDS_DB,
};
use vcsra::numerics::RngStream;

fn practical(trials: usize) -> ScenarioConfig {
    ScenarioConfig {
        model: ModelTag::Practical,
        trials,
        ..ScenarioConfig::default()
    }
}

/// Hermitian `P` as the real symmetric embedding `[[Re, -Im], [Im, Re]]`,
/// whose spectrum is that of `P` with every eigenvalue doubled.
fn real_embedding(p: &vcsra::numerics::ComplexMatrix) -> DMatrix<f64> {
    let m = p.rows();
    DMatrix::from_fn(2 * m, 2 * m, |r, c| {
        let z: Complex64 = p[(r % m, c % m)];
        match (r < m, c < m) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

#[test]
fn projector_spectrum_is_zero_and_one() {
    for (tag, m, n_a) in [(ModelTag::Simplified, 24, 5), (ModelTag::Practical, 32, 8)] {
        let cfg = ScenarioConfig {
            model: tag,
            m,
            ..ScenarioConfig::default()
        };
        let model = ChannelModel::new(&cfg.channel_params()).unwrap();
        let mut rng = RngStream::new(9, 9).rng();
        let h = model.draw_columns(n_a, &mut rng);
        let p = orthogonal_complement(&h).unwrap().matrix();
        let eig = SymmetricEigen::new(real_embedding(&p)).eigenvalues;
        let mut values: Vec<f64> = eig.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        let zeros = values.iter().filter(|v| v.abs() < 1e-8).count();
        let ones = values.iter().filter(|v| (*v - 1.0).abs() < 1e-8).count();
        assert_eq!(zeros, 2 * n_a, "{tag}: {values:?}");
        assert_eq!(ones, 2 * (m - n_a), "{tag}");
    }
}

#[test]
fn results_are_reproducible_from_the_seed() {
    let cfg = ScenarioConfig {
        m: 48,
        trials: 60,
        n_r: 3,
        lambda_db: 6.0,
        ..practical(60)
    };
    let a = simulate(&cfg, Execution::Sequential).unwrap();
    let b = simulate(&cfg, Execution::default()).unwrap();
    assert_eq!(a, b);
    let c = simulate(
        &ScenarioConfig {
            seed: cfg.seed + 1,
            ..cfg.clone()
        },
        Execution::default(),
    )
    .unwrap();
    assert_ne!(a.rows, c.rows);
}

#[test]
fn lambda_sweep_is_monotone() {
    let cfg = ScenarioConfig {
        m: 48,
        n_r: 2,
        n_c: 4,
        ..practical(200)
    };
    let table = sweep(
        &cfg,
        SweepAxis::LambdaDb,
        &[2.0, 4.0, 6.0, 10.0],
        Execution::default(),
    )
    .unwrap();
    let p = table.numbers("p_sim").unwrap();
    assert!(p.windows(2).all(|w| w[0] <= w[1]), "{p:?}");
    let acc = table.numbers("acceptance_rate").unwrap();
    assert!(acc.windows(2).all(|w| w[0] <= w[1]), "{acc:?}");
}

#[test]
fn assigned_rate_falls_with_more_ra_ues() {
    let cfg = ScenarioConfig {
        lambda_db: PRACTICAL_THRESHOLDS_DB[1],
        ..practical(400)
    };
    let n_r: Vec<usize> = (0..=10).collect();
    let grid = estimate_rate_grid(&cfg, &n_r, &[-10.0], Execution::default()).unwrap();
    for w in grid[0].windows(2) {
        assert!(w[0].vcs_rate.mean >= w[1].vcs_rate.mean);
        assert!(w[0].unfiltered_rate.mean >= w[1].unfiltered_rate.mean);
        assert!(w[1].upper_rate.mean >= w[1].vcs_rate.mean);
        assert!(w[1].vcs_rate.mean >= w[1].unfiltered_rate.mean);
    }
}

#[test]
fn vcs_supports_many_more_ra_ues_than_random_access() {
    // targeted assigned-UE rates at rho_U = -10 dB
    for (kind, target) in [(BeamformerKind::Cb, 1.9), (BeamformerKind::Zf, 2.6)] {
        let cfg = ScenarioConfig {
            beamformer: kind,
            lambda_db: PRACTICAL_THRESHOLDS_DB[1],
            ..practical(500)
        };
        let n_r: Vec<usize> = (0..=10).collect();
        let grid = estimate_rate_grid(&cfg, &n_r, &[-10.0], Execution::default()).unwrap();
        let (vcs, unfiltered) = supported_ra_count(&grid[0], target);
        assert!(
            vcs >= 5 && vcs >= 5 * unfiltered,
            "{kind}: VCS supports {vcs}, unfiltered {unfiltered}"
        );
    }
}

#[test]
fn availability_is_insensitive_to_sensing_noise() {
    let base = ScenarioConfig {
        m: 100,
        n_c: 10,
        lambda_db: rate_thresholds(ModelTag::Simplified, 100).unwrap()[0].1,
        trials: 2_000,
        ..ScenarioConfig::default()
    };
    let p: Vec<f64> = [0.0, 10.0, 20.0, f64::INFINITY]
        .iter()
        .map(|&rho_v_db| {
            estimate_p_av(
                &ScenarioConfig {
                    rho_v_db,
                    ..base.clone()
                },
                Execution::default(),
            )
            .unwrap()
            .mean
        })
        .collect();
    let (lo, hi) = p
        .iter()
        .fold((1.0f64, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    assert!(hi - lo <= 0.02, "{p:?}");
}

#[test]
fn confidence_intervals_cover_the_closed_form() {
    // at 12 dB the single-channel availability is near one half
    let lambda_db = 12.0;
    let exact = p_av_single(&AnalyticParams {
        lambda_db,
        ..AnalyticParams::table1(100)
    })
    .unwrap();
    assert!((0.2..0.8).contains(&exact), "{exact}");
    let runs = 40;
    let covered = (0..runs)
        .filter(|&seed| {
            let cfg = ScenarioConfig {
                seed,
                lambda_db,
                trials: 500,
                ..ScenarioConfig::default()
            };
            estimate_p_av(&cfg, Execution::default())
                .unwrap()
                .contains(exact)
        })
        .count();
    assert!(covered as f64 >= 0.9 * runs as f64, "{covered}/{runs}");
}

#[test]
fn single_channel_histogram_follows_closed_form() {
    let cfg = ScenarioConfig {
        trials: 4_000,
        ..ScenarioConfig::default()
    };
    let samples = AvailabilitySamples::draw(&cfg, cfg.trials, 1, Execution::default()).unwrap();
    let base = cfg.analytic_params().unwrap();
    for lambda_db in [2.0, 6.0, 10.0, 14.0] {
        let sim = samples.p_single(lambda_db);
        let exact = p_av_single(&AnalyticParams {
            lambda_db,
            ..base.clone()
        })
        .unwrap();
        assert!(
            (sim.mean - exact).abs() <= 0.03,
            "Λ = {lambda_db}: {} vs {exact}",
            sim.mean
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn availability_grows_with_channels(seed in any::<u64>(), lambda_db in 0.0f64..14.0) {
        let cfg = ScenarioConfig { seed, m: 32, ..ScenarioConfig::default() };
        let s = AvailabilitySamples::draw(&cfg, 30, 6, Execution::default()).unwrap();
        let mut last = 0.0;
        for n_c in 1..=6 {
            let p = s.p_multi(lambda_db, n_c).mean;
            prop_assert!(p >= last);
            last = p;
        }
        prop_assert!(s.p_multi_from_single(lambda_db, 6).unwrap() >= s.p_single(lambda_db).mean);
    }

    #[test]
    fn zero_ra_ues_cost_nothing(seed in any::<u64>(), zf in any::<bool>(), simplified in any::<bool>()) {
        let cfg = ScenarioConfig {
            seed,
            m: 32,
            trials: 8,
            lambda_db: 8.0,
            beamformer: if zf { BeamformerKind::Zf } else { BeamformerKind::Cb },
            model: if simplified { ModelTag::Simplified } else { ModelTag::Practical },
            ..ScenarioConfig::default()
        };
        let grid = estimate_rate_grid(&cfg, &[0, 1], &[-10.0], Execution::default()).unwrap();
        let r0 = &grid[0][0];
        prop_assert_eq!(r0.vcs_rate, r0.upper_rate);
        prop_assert_eq!(r0.unfiltered_rate, r0.upper_rate);
        prop_assert_eq!(grid[0][1].upper_rate, r0.upper_rate);
    }
}
