use proptest::prelude::*;
use tidss_core::metrics::{
    aggregate_measures, best_outcome_index, heuristic_score, MeasureSpec, MeasureValues, Objective,
    Orientation, StrategyOutcome, VehicleRecord, MEAN_SPEED, MEAN_TIME_LOSS, MEAN_TRAVEL_TIME,
    MEAN_WAITING_TIME,
};

fn specs() -> Vec<MeasureSpec> {
    vec![
        MeasureSpec::new(MEAN_SPEED, 0.4, 0.0, 120.0, Orientation::Benefit),
        MeasureSpec::new(MEAN_WAITING_TIME, 0.2, 0.0, 600.0, Orientation::Cost),
        MeasureSpec::new(MEAN_TIME_LOSS, 0.2, 0.0, 900.0, Orientation::Cost),
        MeasureSpec::new(MEAN_TRAVEL_TIME, 0.2, 0.0, 3600.0, Orientation::Cost),
    ]
}

fn values(v: [f64; 4]) -> MeasureValues {
    [
        MEAN_SPEED,
        MEAN_WAITING_TIME,
        MEAN_TIME_LOSS,
        MEAN_TRAVEL_TIME,
    ]
    .iter()
    .zip(v)
    .map(|(k, x)| (k.to_string(), x))
    .collect()
}

fn vehicles() -> impl Strategy<Value = Vec<[f64; 4]>> {
    // waiting time is part of time loss, so draw it as a fraction of it
    prop::collection::vec(
        (0.0f64..130.0, 0.0f64..1.0, 0.0f64..900.0, 1.0f64..3600.0),
        100,
    )
    .prop_map(|rows| {
        rows.into_iter()
            .map(|(s, f, loss, t)| [s, f * loss, loss, t])
            .collect()
    })
}

fn in_range() -> impl Strategy<Value = [f64; 4]> {
    [0.0f64..120.0, 0.0f64..600.0, 0.0f64..900.0, 0.0f64..3600.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn aggregation_matches_brute_force(raw in vehicles()) {
        let trace: Vec<VehicleRecord> = raw
            .iter()
            .enumerate()
            .map(|(i, r)| VehicleRecord {
                vehicle_id: format!("veh{i}"),
                speed: r[0],
                waiting_time: r[1],
                time_loss: r[2],
                total_travel_time: r[3],
            })
            .collect();
        let got = aggregate_measures(&trace).unwrap();
        for (k, name) in [MEAN_SPEED, MEAN_WAITING_TIME, MEAN_TIME_LOSS, MEAN_TRAVEL_TIME].iter().enumerate() {
            let mut total = 0.0;
            for r in &raw {
                total += r[k];
            }
            prop_assert!((got[*name] - total / 100.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn improving_a_measure_never_lowers_h(base in in_range(), which in 0usize..4, step in 0.0f64..200.0) {
        let before = heuristic_score(&values(base), &specs()).unwrap().value;
        let mut better = base;
        // speed is a benefit measure, the rest are costs
        if which == 0 { better[0] += step } else { better[which] = (better[which] - step).max(0.0) }
        let after = heuristic_score(&values(better), &specs()).unwrap().value;
        prop_assert!(after >= before - 1e-12);
    }

    #[test]
    fn h_stays_within_zero_and_weight_sum(v in [-50.0f64..200.0, -50.0f64..700.0, -50.0f64..1000.0, -50.0f64..4000.0]) {
        let h = heuristic_score(&values(v), &specs()).unwrap();
        prop_assert!(h.value >= 0.0 && h.value <= h.weight_sum + 1e-12);
    }

    #[test]
    fn best_strategy_survives_constant_shift(hs in prop::collection::vec(0.0f64..1.0, 1..8), shift in -5.0f64..5.0) {
        let outcomes = |offset: f64| -> Vec<StrategyOutcome> {
            hs.iter()
                .enumerate()
                .map(|(i, h)| StrategyOutcome { strategy_id: format!("s{i}"), values: MeasureValues::new(), heuristic: h + offset })
                .collect()
        };
        for objective in [Objective::Maximize, Objective::Minimize] {
            prop_assert_eq!(
                best_outcome_index(&outcomes(0.0), objective).unwrap(),
                best_outcome_index(&outcomes(shift), objective).unwrap()
            );
        }
    }
}

#[test]
fn extremes_hit_zero_and_weight_sum() {
    let worst = heuristic_score(&values([0.0, 600.0, 900.0, 3600.0]), &specs()).unwrap();
    assert_eq!(worst.value, 0.0);
    let best = heuristic_score(&values([120.0, 0.0, 0.0, 0.0]), &specs()).unwrap();
    assert_eq!(best.value, best.weight_sum);
    assert!(best.clamped.is_empty());
}
