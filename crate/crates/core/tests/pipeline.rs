mod support;

use intrinsic_time::cli::analyze_series;
use intrinsic_time::diagnostics::{
    empirical_dc_probability, read_diagnostics, write_diagnostics, DiagnosticsRow,
};
use intrinsic_time::events::EventCounts;
use intrinsic_time::scaling::{detect_zone, detect_zone_from_pct, fit_power_law, ScalingConfig};
use intrinsic_time::sweep::{make_grid, read_summary, run_sweep_jobs, run_sweep_log, write_summary, ThresholdSummary};
use intrinsic_time::synth::{generate_gbm, GbmParams};
use intrinsic_time::OutputStyle;
use proptest::prelude::*;
use support::random_walk;

fn gbm(n_steps: usize, s0: f64, seed: u64) -> intrinsic_time::TickSeries {
    generate_gbm(&GbmParams {
        s0,
        mu: 0.0,
        sigma: 1e-4,
        n_steps,
        seed,
    })
    .unwrap()
}

#[test]
fn event_count_non_increasing_in_threshold() {
    let series = gbm(1_000_000, 100.0, 7);
    let grid = make_grid(1e-5, 1.0, 50).unwrap();
    let res = run_sweep_jobs(&series, &grid, 0).unwrap();
    let n_ev: Vec<u64> = res.points.iter().map(|p| p.summary.n_ev).collect();
    assert!(n_ev.windows(2).all(|w| w[1] <= w[0]), "{n_ev:?}");
}

#[test]
fn gbm_start_price_does_not_matter() {
    let grid = make_grid(1e-4, 1e-1, 20).unwrap();
    let cfg = ScalingConfig::default();
    let a = analyze_series(&gbm(50_000, 100.0, 3), &grid, &cfg, 1).unwrap();
    let b = analyze_series(&gbm(50_000, 100.0 * 1024.0, 3), &grid, &cfg, 1).unwrap();
    let counts = |x: &intrinsic_time::cli::Analysis| x.summaries.iter().map(|s| s.counts()).collect::<Vec<_>>();
    assert_eq!(counts(&a), counts(&b));
}

#[test]
fn gbm_dc_and_os_slopes_agree() {
    let series = gbm(1_000_000, 100.0, 7);
    let grid = make_grid(1e-5, 1.0, 50).unwrap();
    let a = analyze_series(&series, &grid, &ScalingConfig::default(), 0).unwrap();
    let zone = a.zone.expect("zone");
    let beta = |c: &str| zone.fits.iter().find(|(k, _)| k.as_str() == c).unwrap().1.beta;
    assert!((beta("dc") - beta("os")).abs() < 0.05, "{} vs {}", beta("dc"), beta("os"));
}

#[test]
fn zone_detection_is_idempotent() {
    let series = gbm(1_000_000, 100.0, 7);
    let grid = make_grid(1e-5, 1.0, 50).unwrap();
    let rows = analyze_series(&series, &grid, &ScalingConfig::default(), 0).unwrap().summaries;
    let cfg = ScalingConfig::default();
    let zone = detect_zone(&rows, &cfg).unwrap();
    let inner = &rows[zone.index_range.clone()];
    let again = detect_zone(inner, &cfg).unwrap();
    assert_eq!(again.index_range, 0..inner.len());
    assert_eq!((again.min_delta, again.max_delta), (zone.min_delta, zone.max_delta));
    assert_eq!((again.mean_dc_pct, again.std_dc_pct), (zone.mean_dc_pct, zone.std_dc_pct));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parallel_equals_sequential(seed in 0u64..1000, jobs in 2usize..9) {
        let path = random_walk(seed, 5_000, 1e-3);
        let grid = make_grid(1e-4, 1e-1, 12).unwrap();
        prop_assert_eq!(run_sweep_log(&path, &grid, 1).unwrap(), run_sweep_log(&path, &grid, jobs).unwrap());
    }

    #[test]
    fn share_estimators_agree(n_dc in 1u64..1_000_000, n_os in 0u64..1_000_000) {
        let p = empirical_dc_probability(n_dc, n_os).unwrap();
        prop_assert!((p.p1 - p.p2.unwrap()).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn fit_ignores_frequency_scale(beta in -3.0f64..-0.5, scale in 1e-3f64..1e6, seed in 0u64..1000) {
        let grid = make_grid(1e-3, 1e-1, 10).unwrap();
        let d = grid.deltas();
        let noise = random_walk(seed, d.len(), 0.01);
        let f: Vec<f64> = d.iter().zip(&noise).map(|(x, e)| x.powf(beta) * e.exp()).collect();
        let g: Vec<f64> = f.iter().map(|v| v * scale).collect();
        let a = fit_power_law(d, &f).unwrap();
        let b = fit_power_law(d, &g).unwrap();
        prop_assert!((a.beta - b.beta).abs() < 1e-9);
        prop_assert!((a.r_squared - b.r_squared).abs() < 1e-9);
        prop_assert!((a.p_value - b.p_value).abs() < 1e-9);
    }

    #[test]
    fn zone_is_contiguous_band(pcts in proptest::collection::vec(proptest::option::weighted(0.9, 55.0f64..68.0), 5..50)) {
        let deltas: Vec<f64> = (0..pcts.len()).map(|i| 1e-5 * 1.3f64.powi(i as i32)).collect();
        let cfg = ScalingConfig::default();
        if let Ok(z) = detect_zone_from_pct(&deltas, &pcts, &cfg) {
            prop_assert!(pcts[z.index_range.start].unwrap() >= cfg.target_pct);
            for p in &pcts[z.index_range.clone()] {
                prop_assert!((p.unwrap() - cfg.target_pct).abs() <= cfg.tolerance_pct);
            }
            prop_assert!(pcts[..z.index_range.start].iter().all(|p| p.is_none_or(|p| p < cfg.target_pct)));
            let again = detect_zone_from_pct(&deltas[z.index_range.clone()], &pcts[z.index_range.clone()], &cfg).unwrap();
            prop_assert_eq!(again.n_deltas, z.n_deltas);
        }
    }

    #[test]
    fn summary_round_trips(rows in proptest::collection::vec((1e-6f64..1.0, 0u64..100_000, 0u64..100_000), 1..20)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("summary.csv");
        let rows: Vec<ThresholdSummary> = rows
            .into_iter()
            .map(|(d, n_dc, n_os)| ThresholdSummary::from_counts(d, EventCounts { n_dc, n_os }, 1_000_000))
            .collect();
        write_summary(&path, &rows, OutputStyle::Full).unwrap();
        prop_assert_eq!(read_summary(&path).unwrap(), rows);
    }

    #[test]
    fn diagnostics_round_trip(vals in proptest::collection::vec(proptest::option::of(-1.0f64..2.0), 10)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("diagnostics.csv");
        let row = DiagnosticsRow {
            delta: 0.01,
            p_mean: vals[0],
            diff: vals[1],
            p_geom: vals[2],
            geo_chi2_p: vals[3].map(f64::abs),
            geo_ks_p: vals[4].map(f64::abs),
            lam_hat: vals[5],
            exp_ks_p: vals[6].map(f64::abs),
            lam_ci_low: vals[7],
            lam_ci_high: vals[8],
            p_pred: vals[9],
        };
        write_diagnostics(&path, std::slice::from_ref(&row), OutputStyle::Full).unwrap();
        prop_assert_eq!(read_diagnostics(&path).unwrap(), vec![row]);
    }
}
