//! Decomposition of an open interval `(a,b)` of `2^ω` into a ℤ-indexed,
//! order-coherent family of cones.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::EpPoint;
use crate::word::Word;

/// `(a,b) = ⋃_{n∈ℤ} [s_n]`. Negative indices descend toward `a` through the
/// prefix-flip cones of `a`; indices `≥ 0` ascend toward `b` through those of `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalDecomposition {
    pub a: EpPoint,
    pub b: EpPoint,
    pub window: usize,
    /// `s_n` for `n ∈ [-(window+1), window]`, ascending.
    pub words: Vec<Word>,
}

pub fn interval_decompose(a: &EpPoint, b: &EpPoint, window: usize) -> Result<IntervalDecomposition> {
    IntervalDecomposition::new(a, b, window)
}

impl IntervalDecomposition {
    pub fn new(a: &EpPoint, b: &EpPoint, window: usize) -> Result<Self> {
        if a >= b {
            return Err(Error::Domain(format!("interval needs {a} < {b}")));
        }
        if a.successor().is_some() {
            return Err(Error::Unsupported(format!("left endpoint {a} has an immediate successor")));
        }
        if b.predecessor().is_some() {
            return Err(Error::Unsupported(format!("right endpoint {b} has an immediate predecessor")));
        }
        let mut d = IntervalDecomposition { a: a.clone(), b: b.clone(), window, words: Vec::new() };
        let w = window as i64;
        d.words = (-(w + 1)..=w).map(|n| d.piece(n)).collect();
        Ok(d)
    }

    /// Index where `a` and `b` first differ.
    fn split(&self) -> usize {
        self.a.divergence(&self.b).expect("a < b")
    }

    /// `s_n`.
    pub fn piece(&self, n: i64) -> Word {
        let (pt, digit, k) = if n < 0 {
            (&self.a, 0u8, (-n - 1) as usize)
        } else {
            (&self.b, 1u8, n as usize)
        };
        let j = pt
            .nth_position(self.split() + 1, digit, k)
            .expect("endpoint conditions guarantee infinitely many branch points");
        let mut s = pt.prefix(j);
        s.push(1 - digit);
        s
    }

    /// Index `n` with `x ∈ [s_n]`, or `None` when `x ∉ (a,b)`.
    pub fn locate(&self, x: &EpPoint) -> Option<i64> {
        if *x <= self.a || *x >= self.b {
            return None;
        }
        let j0 = self.split();
        if x.digit(j0) == 0 {
            let j = x.divergence(&self.a)?;
            Some(-1 - self.a.count_digit(j0 + 1, j, 0) as i64)
        } else {
            let j = x.divergence(&self.b)?;
            Some(self.b.count_digit(j0 + 1, j, 1) as i64)
        }
    }

    /// Index of the first materialized word in `words`.
    pub fn first_index(&self) -> i64 {
        -(self.window as i64) - 1
    }
}
