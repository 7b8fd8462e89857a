#![allow(dead_code)]

use cantor_cdh::point::EpPoint;
use cantor_cdh::tailclass::TailClass;
use cantor_cdh::word::Word;
use proptest::prelude::*;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn word_of(bits: Vec<u8>) -> Word {
    Word::from_digits(bits).expect("binary digits")
}

pub fn arb_word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0u8..2, 0..=max).prop_map(word_of)
}

/// `u(v)` with `|u| ≤ pre`, `1 ≤ |v| ≤ per`.
pub fn arb_point_with(pre: usize, per: usize) -> impl Strategy<Value = EpPoint> {
    (arb_word(pre), prop::collection::vec(0u8..2, 1..=per))
        .prop_map(|(u, v)| EpPoint::canonicalize(u, word_of(v)).expect("nonempty period"))
}

pub fn arb_point() -> impl Strategy<Value = EpPoint> {
    arb_point_with(6, 5)
}

pub fn arb_non_q_point() -> impl Strategy<Value = EpPoint> {
    arb_point().prop_filter("outside Q", |p| !p.in_q())
}

pub fn arb_class() -> impl Strategy<Value = TailClass> {
    prop::collection::vec(0u8..2, 1..=5).prop_map(|v| TailClass::from_period(&word_of(v)).expect("nonempty"))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_word<R: Rng>(r: &mut R, max: usize) -> Word {
    let n = r.random_range(0..=max);
    word_of((0..n).map(|_| r.random_range(0..2u8)).collect())
}

/// A random point with preperiod up to `pre` and period up to `per`.
pub fn random_point<R: Rng>(r: &mut R, pre: usize, per: usize) -> EpPoint {
    let u = random_word(r, pre);
    let n = r.random_range(1..=per);
    let v = word_of((0..n).map(|_| r.random_range(0..2u8)).collect());
    EpPoint::canonicalize(u, v).expect("nonempty period")
}

pub fn random_non_q<R: Rng>(r: &mut R, pre: usize, per: usize) -> EpPoint {
    loop {
        let p = random_point(r, pre, per);
        if !p.in_q() {
            return p;
        }
    }
}
