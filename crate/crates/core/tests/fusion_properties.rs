use proptest::prelude::*;
use tidss_core::{fuse, BinaryPlan};

/// Counts ones per position and applies the half-up rule with floats.
fn counting_oracle(plans: &[Vec<u8>]) -> Vec<u8> {
    let m = plans.len() as f64;
    (0..plans[0].len())
        .map(|j| {
            let ones = plans.iter().filter(|p| p[j] == 1).count() as f64;
            let avg = ones / m;
            if avg >= 0.5 {
                1
            } else {
                0
            }
        })
        .collect()
}

fn to_plans(raw: &[Vec<u8>]) -> Vec<BinaryPlan> {
    raw.iter()
        .map(|b| BinaryPlan::new(b.clone(), "g").unwrap())
        .collect()
}

fn plan_set() -> impl Strategy<Value = Vec<Vec<u8>>> {
    (1usize..=12, 1usize..=9)
        .prop_flat_map(|(n, m)| prop::collection::vec(prop::collection::vec(0u8..=1, n), m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn matches_counting_oracle(raw in plan_set()) {
        let fused = fuse(&to_plans(&raw)).unwrap();
        let expected = counting_oracle(&raw);
        prop_assert_eq!(fused.bits(), expected.as_slice());
        prop_assert_eq!(fused.len(), raw[0].len());
        prop_assert_eq!(fused.source, format!("fused({})", raw.len()));
    }

    #[test]
    fn permutation_invariant(raw in plan_set(), rotate in 0usize..9) {
        let mut shuffled = raw.clone();
        let len = shuffled.len();
        shuffled.rotate_left(rotate % len);
        shuffled.reverse();
        let a = fuse(&to_plans(&raw)).unwrap();
        let b = fuse(&to_plans(&shuffled)).unwrap();
        prop_assert_eq!(a.bits(), b.bits());
    }

    #[test]
    fn idempotent(bits in prop::collection::vec(0u8..=1, 1..12), m in 1usize..8) {
        let copies = vec![bits.clone(); m];
        let fused = fuse(&to_plans(&copies)).unwrap();
        prop_assert_eq!(fused.bits(), bits.as_slice());
    }

    #[test]
    fn odd_m_is_strict_majority(
        n in 1usize..10,
        half in 0usize..5,
        seed in prop::collection::vec(0u8..=1, 100),
    ) {
        let m = 2 * half + 1;
        let raw: Vec<Vec<u8>> = (0..m).map(|i| (0..n).map(|j| seed[(i * n + j) % seed.len()]).collect()).collect();
        let fused = fuse(&to_plans(&raw)).unwrap();
        for j in 0..n {
            let ones = raw.iter().filter(|p| p[j] == 1).count();
            prop_assert_eq!(fused.bits()[j] == 1, 2 * ones > m);
        }
    }
}
