mod common;

use cantor_cdh::arrow::{
    lift, ordered_synthesize, sample_arrow_points, ArrowMap, ArrowPresentation, OrderedInstance,
};
use cantor_cdh::engine::{certify, synthesize, EvaluableHomeo, PlainPolicy, ProblemInstance};
use cantor_cdh::tailclass::{lyndon_words, SetPresentation, TailClass};
use common::*;
use proptest::prelude::*;

/// The first `n` classes that are not rational endpoints.
fn non_q_classes(n: usize) -> Vec<TailClass> {
    lyndon_words()
        .map(|v| TailClass::from_period(&v).unwrap())
        .filter(|c| !c.is_q())
        .take(n)
        .collect()
}

/// Disjoint nonempty picks from a pool, as class sets.
fn arb_disjoint(parts: usize) -> impl Strategy<Value = Vec<SetPresentation>> {
    let pool = non_q_classes(10);
    (Just(pool.clone()).prop_shuffle(), prop::collection::vec(1usize..3, parts)).prop_map(move |(p, sizes)| {
        let mut it = p.into_iter();
        sizes.into_iter().map(|k| SetPresentation::classes(it.by_ref().take(k))).collect()
    })
}

fn arb_cdh() -> impl Strategy<Value = ProblemInstance> {
    arb_disjoint(2).prop_map(|s| ProblemInstance { x: SetPresentation::all(), d0: s[0].clone(), d1: s[1].clone() })
}

fn arb_ordered() -> impl Strategy<Value = OrderedInstance> {
    arb_disjoint(3).prop_map(|s| OrderedInstance { d0: s[0].clone(), d1: s[1].clone(), w: s[2].clone() })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn cdh_runs_certify_and_repeat(inst in arb_cdh(), stages in 1usize..6) {
        let (policy, run) = synthesize(&inst, stages).unwrap();
        let cert = certify(&run, &policy, 8);
        prop_assert!(cert.passed(), "{:?}", cert.failures().collect::<Vec<_>>());
        let (_, again) = synthesize(&inst, stages).unwrap();
        prop_assert_eq!(run, again);
    }

    #[test]
    fn evaluations_nest(inst in arb_cdh(), x in arb_point()) {
        let mut h = EvaluableHomeo::new(PlainPolicy::new(inst).unwrap());
        let mut prev = h.evaluate(&x, 2).unwrap().cone(2);
        for k in 3..9 {
            let c = h.evaluate(&x, k).unwrap().cone(k);
            prop_assert!(prev.is_prefix_of(&c), "k={} {} ⊄ {}", k, c, prev);
            prev = c;
        }
    }

    #[test]
    fn ordered_runs_certify(inst in arb_ordered(), stages in 1usize..5) {
        let (policy, run) = ordered_synthesize(&inst, stages).unwrap();
        let cert = certify(&run, &policy, 8);
        prop_assert!(cert.passed(), "{:?}", cert.failures().collect::<Vec<_>>());
        prop_assert!(cert.verdict("(i)").is_some());
    }

    #[test]
    fn lifted_ordered_maps_preserve_order(inst in arb_ordered(), stages in 1usize..4) {
        let (_, run) = ordered_synthesize(&inst, stages).unwrap();
        let h = ArrowMap::on_cantor(run.current().map.clone());
        let y = ArrowPresentation::new(inst.w.clone()).unwrap();
        let lifted = lift(&h, &y).unwrap();
        let pts = sample_arrow_points(&y, 24);
        let imgs: Vec<_> = pts.iter().map(|p| lifted.apply(p).unwrap()).collect();
        for i in 1..pts.len() {
            prop_assert_eq!(y.compare(&pts[i - 1], &pts[i]).unwrap(), y.compare(&imgs[i - 1], &imgs[i]).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identity_lifts_to_identity(x in arb_non_q_point()) {
        let y = ArrowPresentation::new(SetPresentation::classes([TailClass::of(&x)])).unwrap();
        let id = lift(&ArrowMap::identity(), &y).unwrap();
        for p in y.fiber(&x) {
            prop_assert_eq!(id.apply(&p).unwrap(), p);
        }
    }
}
