#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use tidss_core::topsis::{self, CriterionKind, CriterionSpec, DecisionMatrix};

/// Straight transcription of the six TOPSIS formulas, column-major and with
/// no code shared with the engine.
fn oracle(values: &[Vec<f64>], weights: &[f64], benefit: &[bool]) -> Vec<f64> {
    let m = values.len();
    let n = weights.len();
    let wsum: f64 = weights.iter().sum();
    let mut v = vec![vec![0.0; m]; n];
    for j in 0..n {
        let mut sq = 0.0;
        for i in 0..m {
            sq += values[i][j].powi(2);
        }
        let denom = sq.sqrt();
        for i in 0..m {
            v[j][i] = values[i][j] / denom * (weights[j] / wsum);
        }
    }
    let mut best = vec![0.0; n];
    let mut worst = vec![0.0; n];
    for j in 0..n {
        let hi = v[j].iter().cloned().fold(f64::MIN, f64::max);
        let lo = v[j].iter().cloned().fold(f64::MAX, f64::min);
        if benefit[j] {
            best[j] = hi;
            worst[j] = lo;
        } else {
            best[j] = lo;
            worst[j] = hi;
        }
    }
    (0..m)
        .map(|i| {
            let dp: f64 = (0..n)
                .map(|j| (v[j][i] - best[j]).powi(2))
                .sum::<f64>()
                .sqrt();
            let dm: f64 = (0..n)
                .map(|j| (v[j][i] - worst[j]).powi(2))
                .sum::<f64>()
                .sqrt();
            if dp + dm == 0.0 {
                1.0
            } else {
                dm / (dp + dm)
            }
        })
        .collect()
}

fn matrix(values: Vec<Vec<f64>>, weights: &[f64], benefit: &[bool]) -> DecisionMatrix {
    DecisionMatrix {
        alternatives: (0..values.len()).map(|i| format!("a{i}")).collect(),
        criteria: weights
            .iter()
            .zip(benefit)
            .enumerate()
            .map(|(j, (w, b))| CriterionSpec {
                name: format!("c{j}"),
                weight: *w,
                kind: if *b {
                    CriterionKind::Benefit
                } else {
                    CriterionKind::Cost
                },
            })
            .collect(),
        values,
    }
}

/// Random m <= 5, n <= 3 matrices with strictly positive entries.
fn small_problem() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, Vec<bool>)> {
    (1usize..=5, 1usize..=3).prop_flat_map(|(m, n)| {
        (
            prop::collection::vec(prop::collection::vec(0.1f64..10.0, n), m),
            prop::collection::vec(0.05f64..1.0, n),
            prop::collection::vec(any::<bool>(), n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn engine_matches_oracle((values, weights, benefit) in small_problem()) {
        let expected = oracle(&values, &weights, &benefit);
        let result = topsis::run(&matrix(values, &weights, &benefit)).unwrap();
        for (got, want) in result.closeness.iter().zip(&expected) {
            prop_assert!((got - want).abs() <= 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn closeness_in_unit_interval_and_rank_one_is_max((values, weights, benefit) in small_problem()) {
        let result = topsis::run(&matrix(values, &weights, &benefit)).unwrap();
        let max = result.closeness.iter().cloned().fold(f64::MIN, f64::max);
        for (c, r) in result.closeness.iter().zip(&result.ranks) {
            prop_assert!((0.0..=1.0).contains(c));
            if *r == 1 {
                prop_assert_eq!(*c, max);
            }
        }
        let mut ranks = result.ranks.clone();
        ranks.sort_unstable();
        prop_assert_eq!(ranks, (1..=result.closeness.len()).collect::<Vec<_>>());
    }

    #[test]
    fn column_scale_invariance(
        (values, weights, benefit) in small_problem(),
        column in 0usize..3,
        factor in 0.01f64..100.0,
    ) {
        let column = column % weights.len();
        let base = topsis::run(&matrix(values.clone(), &weights, &benefit)).unwrap();
        let scaled_values = values
            .iter()
            .map(|row| row.iter().enumerate().map(|(j, x)| if j == column { x * factor } else { *x }).collect())
            .collect();
        let scaled = topsis::run(&matrix(scaled_values, &weights, &benefit)).unwrap();
        for (a, b) in base.normalized.iter().flatten().zip(scaled.normalized.iter().flatten()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        for (a, b) in base.closeness.iter().zip(&scaled.closeness) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        // ranks can only differ where closeness values tie within rounding
        for (i, (ra, rb)) in base.ranks.iter().zip(&scaled.ranks).enumerate() {
            if ra != rb {
                let tied = base.closeness.iter().enumerate().any(|(k, c)| k != i && (c - base.closeness[i]).abs() <= 1e-12);
                prop_assert!(tied);
            }
        }
    }

    #[test]
    fn row_permutation_equivariance(
        (values, weights, benefit) in small_problem(),
        seed in any::<u64>(),
    ) {
        let m = values.len();
        let mut perm: Vec<usize> = (0..m).collect();
        // Fisher-Yates with a small LCG, enough for m <= 5
        let mut state = seed;
        for i in (1..m).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            perm.swap(i, j);
        }
        let base = topsis::run(&matrix(values.clone(), &weights, &benefit)).unwrap();
        let permuted_values = perm.iter().map(|&p| values[p].clone()).collect();
        let permuted = topsis::run(&matrix(permuted_values, &weights, &benefit)).unwrap();
        for (k, &p) in perm.iter().enumerate() {
            prop_assert!((permuted.closeness[k] - base.closeness[p]).abs() <= 1e-12);
        }
    }
}
