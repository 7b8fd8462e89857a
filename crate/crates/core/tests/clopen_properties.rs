mod common;

use cantor_cdh::clopen::{ClopenSet, CombineMode};
use cantor_cdh::interval::interval_decompose;
use cantor_cdh::point::EpPoint;
use cantor_cdh::radial::{radial_partition, RadialScheme};
use cantor_cdh::word::Word;
use common::*;
use proptest::prelude::*;

fn arb_clopen() -> impl Strategy<Value = ClopenSet> {
    prop::collection::vec(arb_word(6), 0..6).prop_map(ClopenSet::normalize)
}

fn atoms(c: &ClopenSet, k: usize) -> Vec<bool> {
    Word::all_of_length(k).map(|a| c.words().iter().any(|s| s.is_prefix_of(&a))).collect()
}

const MODES: [CombineMode; 4] =
    [CombineMode::Union, CombineMode::Intersection, CombineMode::Difference, CombineMode::ComplementOfA];

proptest! {
    #[test]
    fn combine_matches_atom_table(a in arb_clopen(), b in arb_clopen()) {
        let (ta, tb) = (atoms(&a, 8), atoms(&b, 8));
        for mode in MODES {
            let expect: Vec<bool> = ta
                .iter()
                .zip(&tb)
                .map(|(&x, &y)| match mode {
                    CombineMode::Union => x || y,
                    CombineMode::Intersection => x && y,
                    CombineMode::Difference => x && !y,
                    CombineMode::ComplementOfA => !x,
                })
                .collect();
            prop_assert_eq!(atoms(&a.combine(&b, mode), 8), expect, "{:?}", mode);
        }
    }

    #[test]
    fn normalize_is_idempotent_and_faithful(ws in prop::collection::vec(arb_word(6), 0..8)) {
        let c = ClopenSet::normalize(ws.clone());
        prop_assert_eq!(ClopenSet::normalize(c.words().to_vec()), c.clone());
        let raw: Vec<bool> = Word::all_of_length(7).map(|a| ws.iter().any(|s| s.is_prefix_of(&a))).collect();
        prop_assert_eq!(atoms(&c, 7), raw);
    }

    #[test]
    fn radial_pieces_are_disjoint_and_shrink(
        base in arb_word(4),
        tail in arb_non_q_point(),
        ordered in any::<bool>(),
        probes in prop::collection::vec(arb_point_with(10, 4), 1..12),
    ) {
        let center = tail.prepend(&base);
        let (scheme, pieces) = radial_partition(base.clone(), center.clone(), ordered, 10).unwrap();
        for (i, a) in pieces.iter().enumerate() {
            prop_assert!(!center.in_cone(a));
            prop_assert!(base.is_prefix_of(a));
            for b in &pieces[i + 1..] {
                prop_assert!(!a.comparable(b), "[{}] and [{}] overlap", a, b);
            }
        }
        if !ordered {
            for (m, p) in pieces.iter().enumerate() {
                prop_assert_eq!(p.len(), base.len() + m + 1);
            }
        }
        for x in probes {
            let x = x.prepend(&base);
            match scheme.locate(&x) {
                None => prop_assert_eq!(&x, &center),
                Some(idx) => {
                    let p = scheme.piece(idx).unwrap();
                    prop_assert!(x.in_cone(&p));
                    let hits = pieces.iter().filter(|q| x.in_cone(q)).count();
                    prop_assert!(hits <= 1);
                }
            }
        }
    }

    #[test]
    fn interval_members_are_exclusive(
        a_tail in arb_non_q_point(),
        b_tail in arb_non_q_point(),
        probes in prop::collection::vec(arb_point_with(8, 4), 1..16),
    ) {
        let a = a_tail.prepend(&Word::from_digits(vec![0]).unwrap());
        let b = b_tail.prepend(&Word::from_digits(vec![1]).unwrap());
        let d = interval_decompose(&a, &b, 8).unwrap();
        for s in &d.words {
            prop_assert!(!a.in_cone(s) && !b.in_cone(s));
            prop_assert!(a < EpPoint::constant_tail(s, 0) && EpPoint::constant_tail(s, 1) < b);
        }
        for pair in d.words.windows(2) {
            prop_assert!(EpPoint::constant_tail(&pair[0], 1) < EpPoint::constant_tail(&pair[1], 0));
        }
        for x in probes {
            let inside = a < x && x < b;
            let hits: Vec<usize> = (0..d.words.len()).filter(|&i| x.in_cone(&d.words[i])).collect();
            prop_assert!(hits.len() <= 1);
            match d.locate(&x) {
                None => prop_assert!(!inside),
                Some(n) => {
                    prop_assert!(inside);
                    prop_assert!(x.in_cone(&d.piece(n)));
                    if let Some(&i) = hits.first() {
                        prop_assert_eq!(d.first_index() + i as i64, n);
                    }
                }
            }
        }
    }
}

#[test]
fn scheme_rejects_ordered_q_center() {
    assert!(RadialScheme::new(Word::empty(), EpPoint::parse_normalized("01(0)").unwrap(), true).is_err());
}
