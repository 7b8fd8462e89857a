//! Eventually periodic points of Cantor space in canonical `u(v)` form.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::word::Word;

/// The point `u⌢v⌢v⌢…` of `2^ω`, always held in canonical form: `v` primitive and
/// `u` as short as possible.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EpPoint {
    preperiod: Word,
    period: Word,
}

/// Which of the two sets of "rational" points a point belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QClass {
    Q0,
    Q1,
    None,
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

impl EpPoint {
    pub fn canonicalize(preperiod: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::MalformedInput("empty period".into()));
        }
        let mut pre = preperiod;
        let mut per = period.primitive_root();
        while let (Some(c), Some(d)) = (pre.last(), per.last()) {
            if c != d {
                break;
            }
            pre.pop();
            per = per.rotate_right();
        }
        Ok(EpPoint { preperiod: pre, period: per })
    }

    /// `w⌢c^ω`.
    pub fn constant_tail(w: &Word, c: u8) -> Self {
        Self::canonicalize(w.clone(), Word::from_digits_unchecked(vec![c])).expect("nonempty period")
    }

    /// `(v)^ω`.
    pub fn periodic(v: &Word) -> Result<Self> {
        Self::canonicalize(Word::empty(), v.clone())
    }

    pub fn preperiod(&self) -> &Word {
        &self.preperiod
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn digit(&self, n: usize) -> u8 {
        let u = self.preperiod.len();
        if n < u {
            self.preperiod.digit(n)
        } else {
            self.period.digit((n - u) % self.period.len())
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word::from_digits_unchecked((0..n).map(|i| self.digit(i)).collect())
    }

    pub fn in_cone(&self, s: &Word) -> bool {
        s.digits().iter().enumerate().all(|(i, &d)| self.digit(i) == d)
    }

    /// `w⌢self`.
    pub fn prepend(&self, w: &Word) -> Self {
        Self::canonicalize(w.concat(&self.preperiod), self.period.clone()).expect("nonempty period")
    }

    /// The shift `σ^k`.
    pub fn shift(&self, k: usize) -> Self {
        let u = self.preperiod.len();
        if k <= u {
            Self::canonicalize(self.preperiod.suffix_from(k), self.period.clone())
        } else {
            let r = (k - u) % self.period.len();
            Self::canonicalize(Word::empty(), self.period.rotate_left(r))
        }
        .expect("nonempty period")
    }

    /// Replace the first `|from|` digits (which must equal `from`) by `to`.
    pub fn translate(&self, from: &Word, to: &Word) -> Self {
        debug_assert!(self.in_cone(from));
        self.shift(from.len()).prepend(to)
    }

    /// Index past which the two expansions can no longer first disagree.
    fn agreement_bound(&self, other: &EpPoint) -> usize {
        self.preperiod.len() + other.preperiod.len() + lcm(self.period.len(), other.period.len())
    }

    /// First index where the expansions differ, `None` when equal.
    pub fn divergence(&self, other: &EpPoint) -> Option<usize> {
        (0..self.agreement_bound(other)).find(|&i| self.digit(i) != other.digit(i))
    }

    /// Position of the `k`-th (0-based) occurrence of `digit` at index `>= start`.
    /// `None` when the digit occurs fewer than `k+1` times from there on.
    pub fn nth_position(&self, start: usize, digit: u8, k: usize) -> Option<usize> {
        let tail_start = start.max(self.preperiod.len());
        let per = self.period.len();
        let per_count = self.period.digits().iter().filter(|&&d| d == digit).count();
        let mut seen = 0;
        let mut i = start;
        loop {
            if i >= tail_start && per_count == 0 {
                return None;
            }
            if self.digit(i) == digit {
                if seen == k {
                    return Some(i);
                }
                seen += 1;
            }
            i += 1;
            // skip whole periods once inside the tail
            if i >= tail_start && per_count > 0 && k - seen > per_count {
                let periods = (k - seen) / per_count - 1;
                seen += periods * per_count;
                i += periods * per;
            }
        }
    }

    /// Number of occurrences of `digit` in positions `start..end`.
    pub fn count_digit(&self, start: usize, end: usize, digit: u8) -> usize {
        (start..end).filter(|&i| self.digit(i) == digit).count()
    }

    /// Whether `self(start+m)` and `other(other_start+m)` agree for all large `m`.
    pub fn tails_eventually_agree(&self, start: usize, other: &EpPoint, other_start: usize) -> bool {
        let a = self.shift(start);
        let b = other.shift(other_start);
        let k = a.preperiod.len().max(b.preperiod.len());
        a.shift(k) == b.shift(k)
    }

    /// Whether `self(start+m)` and `other(other_start+m)` disagree for all large `m`.
    pub fn tails_eventually_complementary(
        &self,
        start: usize,
        other: &EpPoint,
        other_start: usize,
    ) -> bool {
        let flipped = other.complement();
        self.tails_eventually_agree(start, &flipped, other_start)
    }

    /// Digit-wise complement.
    pub fn complement(&self) -> Self {
        let flip = |w: &Word| Word::from_digits_unchecked(w.digits().iter().map(|d| 1 - d).collect());
        Self::canonicalize(flip(&self.preperiod), flip(&self.period)).expect("nonempty period")
    }

    pub fn tail_equiv(&self, other: &EpPoint) -> bool {
        self.necklace() == other.necklace()
    }

    /// Least rotation of the primitive period; names the tail class.
    pub fn necklace(&self) -> Word {
        self.period.least_rotation()
    }

    pub fn classify_q(&self) -> QClass {
        match self.period.digits() {
            [0] => QClass::Q0,
            [1] => QClass::Q1,
            _ => QClass::None,
        }
    }

    pub fn in_q(&self) -> bool {
        self.classify_q() != QClass::None
    }

    pub fn is_least(&self) -> bool {
        self.preperiod.is_empty() && self.period.digits() == [0]
    }

    pub fn is_greatest(&self) -> bool {
        self.preperiod.is_empty() && self.period.digits() == [1]
    }

    /// Immediate predecessor, present exactly for non-least points of `Q0`.
    pub fn predecessor(&self) -> Option<EpPoint> {
        if self.classify_q() != QClass::Q0 || self.is_least() {
            return None;
        }
        // canonical form is w1(0)
        let stem = self.preperiod.prefix(self.preperiod.len() - 1);
        Some(EpPoint::constant_tail(&stem.child(0), 1))
    }

    /// Immediate successor, present exactly for non-greatest points of `Q1`.
    pub fn successor(&self) -> Option<EpPoint> {
        if self.classify_q() != QClass::Q1 || self.is_greatest() {
            return None;
        }
        let stem = self.preperiod.prefix(self.preperiod.len() - 1);
        Some(EpPoint::constant_tail(&stem.child(1), 0))
    }

    /// Parse `u(v)`; rejects non-canonical input.
    pub fn parse_strict(s: &str) -> Result<Self> {
        let (pre, per) = split_notation(s)?;
        let p = Self::canonicalize(pre.clone(), per.clone())?;
        if p.preperiod != pre || p.period != per {
            return Err(Error::MalformedInput(format!("{s:?} is not canonical; canonical form is {p}")));
        }
        Ok(p)
    }

    /// Parse `u(v)` and canonicalize.
    pub fn parse_normalized(s: &str) -> Result<Self> {
        let (pre, per) = split_notation(s)?;
        Self::canonicalize(pre, per)
    }
}

fn split_notation(s: &str) -> Result<(Word, Word)> {
    let s = s.trim();
    let open = s.find('(').ok_or_else(|| Error::MalformedInput(format!("missing '(' in {s:?}")))?;
    if !s.ends_with(')') {
        return Err(Error::MalformedInput(format!("missing ')' in {s:?}")));
    }
    let pre: Word = s[..open].parse()?;
    let per: Word = s[open + 1..s.len() - 1].parse()?;
    if per.is_empty() {
        return Err(Error::MalformedInput(format!("empty period in {s:?}")));
    }
    Ok((pre, per))
}

impl Ord for EpPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.divergence(other) {
            Some(i) => self.digit(i).cmp(&other.digit(i)),
            None => Ordering::Equal,
        }
    }
}

impl PartialOrd for EpPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EpPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.preperiod, self.period)
    }
}

impl fmt::Debug for EpPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for EpPoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_strict(s)
    }
}

impl Serialize for EpPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for EpPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        EpPoint::parse_strict(&s).map_err(serde::de::Error::custom)
    }
}

/// Shorthand used across the crate's tests; accepts non-canonical input.
pub fn pt(s: &str) -> EpPoint {
    EpPoint::parse_normalized(s).expect("valid point literal")
}
