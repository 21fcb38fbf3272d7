use cp3o::search::{
    check_recurrence, dp_iterate, exhaustive_search, h_value, max_feasible_changes, prune_step,
    run_dp, select_num_changes, DpState, ExhaustiveLimits,
};
use cp3o::{run_cp3o, Cp3oConfig, GofMetric, Segmentation, TimeSeries};
use proptest::prelude::*;

fn metrics() -> impl Strategy<Value = GofMetric> {
    prop_oneof![
        (0.2..2.0f64).prop_map(GofMetric::energy),
        (0.2..2.0f64).prop_map(GofMetric::energy_complete),
        Just(GofMetric::ks()),
        Just(GofMetric::ks_windowed()),
    ]
}

/// Short piecewise series; integer-valued draws give ties.
fn series(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(
        prop_oneof![(-4i32..4).prop_map(f64::from), -10.0..10.0f64],
        12..=max_len,
    )
}

fn legal(seg: &Segmentation, len: usize, w: usize) -> bool {
    let cps = seg.change_points();
    let gaps_ok = cps.windows(2).all(|p| p[1] - p[0] >= w);
    let bounds_ok =
        cps.first().is_none_or(|&f| f > w) && cps.last().is_none_or(|&l| l + w <= len + 1);
    seg.series_len() == len && gaps_ok && bounds_ok && seg.check_min_size(w).is_ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn single_change_is_exact(values in series(40), metric in metrics(), w in 2usize..6) {
        prop_assume!(values.len() >= 2 * w);
        let seq = TimeSeries::from_values(values).unwrap();
        let metric = metric.with_delta(w - 1);
        let res = run_cp3o(&seq, &Cp3oConfig::new(1, w, metric.clone())).unwrap();
        let eval = metric.prepare(&seq).unwrap();
        let (best, seg) = exhaustive_search(&eval, 1, w, ExhaustiveLimits::default()).unwrap();
        prop_assert_eq!(res.gof_curve[0].to_bits(), best.to_bits());
        prop_assert_eq!(&res.segmentations[0], &seg);
    }

    #[test]
    fn exhaustive_dominates_and_segmentations_are_legal(
        values in series(36), metric in metrics(), w in 2usize..6, pruning in any::<bool>(),
    ) {
        prop_assume!(values.len() >= 3 * w);
        let len = values.len();
        let seq = TimeSeries::from_values(values).unwrap();
        let metric = metric.with_delta(w - 1);
        let cfg = Cp3oConfig::new(2, w, metric.clone()).with_pruning(pruning);
        let res = run_cp3o(&seq, &cfg).unwrap();
        let eval = metric.prepare(&seq).unwrap();
        for (kappa, (&g, seg)) in res.gof_curve.iter().zip(&res.segmentations).enumerate() {
            let kappa = kappa + 1;
            let (best, _) = exhaustive_search(&eval, kappa, w, ExhaustiveLimits::default()).unwrap();
            prop_assert!(best >= g, "kappa={} exhaustive {} < dp {}", kappa, best, g);
            prop_assert!(g.is_finite());
            prop_assert_eq!(seg.num_changes(), kappa);
            prop_assert!(legal(seg, len, w), "{:?}", seg);
        }
        prop_assert!(legal(&res.change_points, len, w));
    }

    #[test]
    fn candidate_sets_shrink_and_keep_the_benchmark(values in series(80), metric in metrics(), w in 2usize..8) {
        let len = values.len();
        let max_k = max_feasible_changes(len, w).min(4);
        prop_assume!(max_k >= 2);
        let seq = TimeSeries::from_values(values).unwrap();
        let eval = metric.with_delta(w - 1).prepare(&seq).unwrap();
        let mut state = DpState::new(len, w, max_k, true);
        let mut previous: Vec<Vec<usize>> =
            (0..=len).map(|t| if t + 1 >= 2 * w { (1 + w..=t + 1 - w).collect() } else { Vec::new() }).collect();
        for kappa in 1..max_k {
            dp_iterate(&mut state, &eval, kappa).unwrap();
            for t in 2 * w..=len {
                let next = state.pending_candidates(t);
                prop_assert!(next.contains(&(t + 1 - w)), "benchmark missing at t={} kappa={}", t, kappa);
                prop_assert!(next.iter().all(|tau| previous[t].contains(tau)));
                prop_assert!(next.len() <= previous[t].len());
                prop_assert_eq!(&next, &prune_step(&state, &eval, kappa, t, &previous[t]));
                previous[t] = next;
            }
        }
        dp_iterate(&mut state, &eval, max_k).unwrap();
        let stats = state.prune_stats();
        for kappa in 1..max_k {
            for t in 0..=len {
                prop_assert!(stats.size(kappa + 1, t) <= stats.size(kappa, t));
            }
        }
        for t in 0..=len {
            prop_assert_eq!(stats.size(1, t), (t + 1).saturating_sub(2 * w));
        }
    }

    #[test]
    fn pruned_maximum_never_beats_the_full_range(values in series(70), metric in metrics(), w in 2usize..7) {
        let len = values.len();
        let max_k = max_feasible_changes(len, w).min(4);
        prop_assume!(max_k >= 2);
        let seq = TimeSeries::from_values(values).unwrap();
        let eval = metric.with_delta(w - 1).prepare(&seq).unwrap();
        let mut state = DpState::new(len, w, max_k, true);
        for kappa in 1..=max_k {
            dp_iterate(&mut state, &eval, kappa).unwrap();
            for t in 2 * w..=len {
                let full = (1 + kappa * w..=(t + 1).saturating_sub(w))
                    .map(|tau| h_value(&state, &eval, kappa, tau, t))
                    .fold(f64::NEG_INFINITY, f64::max);
                match state.gof(kappa, t) {
                    Some(g) => prop_assert!(g <= full),
                    None => prop_assert!(full == f64::NEG_INFINITY || kappa > 1),
                }
            }
        }
        prop_assert_eq!(check_recurrence(&state, &eval), None);
    }

    #[test]
    fn unpruned_run_satisfies_the_recurrence(values in series(60), metric in metrics(), w in 2usize..6) {
        let len = values.len();
        prop_assume!(max_feasible_changes(len, w) >= 1);
        let seq = TimeSeries::from_values(values).unwrap();
        let eval = metric.with_delta(w - 1).prepare(&seq).unwrap();
        let (state, _) = run_dp(len, w, 3, false, &eval).unwrap();
        prop_assert_eq!(check_recurrence(&state, &eval), None);
    }

    #[test]
    fn knee_lies_inside_the_curve(curve in prop::collection::vec(0.0..100.0f64, 0..12)) {
        let sel = select_num_changes(&curve);
        if curve.len() >= 3 {
            prop_assert!(!sel.fallback);
            prop_assert!((2..curve.len()).contains(&sel.kappa));
            prop_assert_eq!(sel.sse.len(), curve.len() - 2);
        } else {
            prop_assert!(sel.fallback);
            prop_assert_eq!(sel.kappa, curve.len().max(1));
        }
    }
}

#[test]
fn two_step_series_recovers_both_steps() {
    let mut v = vec![0.0; 14];
    v.extend(vec![6.0; 13]);
    v.extend(vec![-6.0; 13]);
    let seq = TimeSeries::from_values(v).unwrap();
    for metric in [
        GofMetric::energy_complete(1.0),
        GofMetric::ks(),
        GofMetric::energy(1.0),
    ] {
        let res = run_cp3o(&seq, &Cp3oConfig::new(2, 5, metric.clone())).unwrap();
        assert_eq!(
            res.segmentations[1].change_points(),
            &[15, 28],
            "{:?}",
            metric.kind
        );
        let eval = metric.with_delta(4).prepare(&seq).unwrap();
        let (best, seg) = exhaustive_search(&eval, 2, 5, ExhaustiveLimits::default()).unwrap();
        assert_eq!(seg.change_points(), &[15, 28]);
        assert!(best >= res.gof_curve[1]);
    }
}

#[test]
fn constant_series_is_degenerate() {
    let seq = TimeSeries::from_values(vec![3.0; 60]).unwrap();
    let res = run_cp3o(&seq, &Cp3oConfig::new(4, 6, GofMetric::energy(1.0))).unwrap();
    assert!(res.degenerate);
    assert!(res.gof_curve.iter().all(|&g| g == 0.0));
    // Equal H values prune nothing: only the lower bound of each level bites.
    for kappa in 1..=4 {
        for t in 0..=60 {
            assert_eq!(
                res.prune_stats.size(kappa, t),
                (t + 1).saturating_sub((kappa + 1) * 6)
            );
        }
    }
}

#[test]
fn max_changes_is_capped_by_the_series() {
    let seq = TimeSeries::from_values((0..50).map(|i| (i % 7) as f64).collect()).unwrap();
    let res = run_cp3o(&seq, &Cp3oConfig::new(10, 10, GofMetric::ks())).unwrap();
    assert_eq!(res.effective_max_k, 4);
    assert_eq!(res.gof_curve.len(), 4);
    assert_eq!(res.segmentations.len(), 4);
}

#[test]
fn config_errors() {
    let seq = TimeSeries::from_values(vec![1.0; 50]).unwrap();
    let err = run_cp3o(&seq, &Cp3oConfig::new(3, 30, GofMetric::energy(1.0))).unwrap_err();
    assert!(err.to_string().contains("series too short"));
    assert!(err.is_config_error());
    assert!(run_cp3o(&seq, &Cp3oConfig::new(3, 5, GofMetric::energy(2.5))).is_err());
    assert!(run_cp3o(
        &seq,
        &Cp3oConfig::new(3, 5, GofMetric::energy(1.0).with_delta(5))
    )
    .is_err());
    assert!(run_cp3o(&seq, &Cp3oConfig::new(3, 1, GofMetric::ks())).is_err());
    let wide = TimeSeries::from_rows(&vec![vec![0.0, 1.0]; 40]).unwrap();
    assert!(run_cp3o(&wide, &Cp3oConfig::new(2, 5, GofMetric::ks())).is_err());
    assert!(run_cp3o(&wide, &Cp3oConfig::new(2, 5, GofMetric::energy(1.0))).is_ok());
}

#[test]
fn exhaustive_refuses_large_instances() {
    let seq = TimeSeries::from_values((0..80).map(f64::from).collect()).unwrap();
    let eval = GofMetric::ks().prepare(&seq).unwrap();
    assert!(exhaustive_search(&eval, 1, 5, ExhaustiveLimits::default()).is_err());
    let limits = ExhaustiveLimits {
        max_len: 100,
        max_changes: 1,
    };
    assert!(exhaustive_search(&eval, 1, 5, limits).is_ok());
}
