use proptest::prelude::*;

use snipe::estimators::EstimatorKind;
use snipe::graph::Graph;
use snipe::oracle::{enumerate_estimator, joint_effects};
use snipe::outcomes::{generate_instance, ground_truth_tte, Link, PotentialOutcomes};
use snipe::randomization::Assignment;

// First two moments of each estimator by direct summation over 2^n.
fn brute_moments<M: PotentialOutcomes>(model: &M, g: &Graph, p: f64, kind: EstimatorKind) -> (f64, f64) {
    let n = model.n();
    let (mut m1, mut m2) = (0.0, 0.0);
    for mask in 0u32..(1 << n) {
        let z: Vec<bool> = (0..n).map(|b| mask >> b & 1 == 1).collect();
        let k = z.iter().filter(|&&b| b).count() as i32;
        let prob = p.powi(k) * (1.0 - p).powi(n as i32 - k);
        let y = model.outcomes(&z).unwrap();
        let est = kind.estimate(g, &y, &Assignment::new(z, p).unwrap()).unwrap();
        m1 += prob * est;
        m2 += prob * est * est;
    }
    (m1, m2 - m1 * m1)
}

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (3usize..=9).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..2 * n).prop_map(move |e| Graph::from_edges(n, e).unwrap().0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn enumeration_matches_direct_summation(
        g in graph_strategy(),
        p in prop_oneof![Just(0.3), Just(0.5), Just(0.7)],
        seed in any::<u64>(),
        threshold in any::<bool>(),
    ) {
        let link = if threshold { Link::Threshold(0.8) } else { Link::Sqrt };
        let model = generate_instance(&g, 1.0, 0.5, link, seed).unwrap();
        for kind in EstimatorKind::ALL {
            let r = enumerate_estimator(&model, &g, p, kind).unwrap();
            let (mean, var) = brute_moments(&model, &g, p, kind);
            prop_assert!((r.mean - mean).abs() < 1e-10, "{kind:?} mean {} vs {mean}", r.mean);
            prop_assert!((r.variance - var).abs() < 1e-10, "{kind:?} var {} vs {var}", r.variance);
        }
    }

    #[test]
    fn joint_effects_reconstruct_outcomes_and_tte(g in graph_strategy(), seed in any::<u64>()) {
        let model = generate_instance(&g, 1.0, 0.4, Link::Sqrt, seed).unwrap();
        let truth = model.true_neighborhoods().unwrap();
        let je = joint_effects(&model, &truth).unwrap();
        let n = g.n();
        for mask in [0u32, 0b1011, (1 << n) - 1] {
            let z: Vec<bool> = (0..n).map(|b| mask >> b & 1 == 1).collect();
            let y = model.outcomes(&z).unwrap();
            for (i, yi) in y.iter().enumerate() {
                prop_assert!((je.evaluate(i, &z) - yi).abs() < 1e-10);
            }
        }
        prop_assert!((je.tte() - ground_truth_tte(&model).unwrap()).abs() < 1e-10);
    }
}
