//! Finite binary words, the names of basic cones `[s]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite word over `{0,1}`. Digits are stored one per byte.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_digits(digits: Vec<u8>) -> Result<Self> {
        if let Some(d) = digits.iter().find(|&&d| d > 1) {
            return Err(Error::MalformedInput(format!("digit {d} is not binary")));
        }
        Ok(Word(digits))
    }

    pub(crate) fn from_digits_unchecked(digits: Vec<u8>) -> Self {
        debug_assert!(digits.iter().all(|&d| d <= 1));
        Word(digits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn digit(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn push(&mut self, d: u8) {
        debug_assert!(d <= 1);
        self.0.push(d);
    }

    pub fn pop(&mut self) -> Option<u8> {
        self.0.pop()
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }

    pub fn child(&self, d: u8) -> Word {
        let mut w = self.clone();
        w.push(d);
        w
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n].to_vec())
    }

    pub fn suffix_from(&self, n: usize) -> Word {
        Word(self.0[n..].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// True when `[self]` and `[other]` intersect, i.e. one is a prefix of the other.
    pub fn comparable(&self, other: &Word) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// `self` with the last digit flipped. Panics on the empty word.
    pub fn sibling(&self) -> Word {
        let mut w = self.clone();
        let d = w.0.pop().expect("empty word has no sibling");
        w.0.push(1 - d);
        w
    }

    /// Smallest primitive word whose power is `self`.
    pub fn primitive_root(&self) -> Word {
        let n = self.len();
        for p in 1..=n {
            if n.is_multiple_of(p) && (p..n).all(|i| self.0[i] == self.0[i - p]) {
                return Word(self.0[..p].to_vec());
            }
        }
        self.clone()
    }

    /// Rotate one step to the right: `c⌢rest` where `c` was the last digit.
    pub fn rotate_right(&self) -> Word {
        let mut v = self.0.clone();
        if let Some(c) = v.pop() {
            v.insert(0, c);
        }
        Word(v)
    }

    /// Left rotation by `k` places.
    pub fn rotate_left(&self, k: usize) -> Word {
        if self.is_empty() {
            return self.clone();
        }
        let k = k % self.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    /// Lexicographically least rotation.
    pub fn least_rotation(&self) -> Word {
        (0..self.len().max(1))
            .map(|k| self.rotate_left(k))
            .min()
            .unwrap_or_default()
    }

    /// Enumerate all words of length `n` in lexicographic order.
    pub fn all_of_length(n: usize) -> impl Iterator<Item = Word> {
        assert!(n < 63, "word length {n} too large to enumerate");
        (0u64..(1u64 << n)).map(move |i| {
            Word((0..n).map(|j| ((i >> (n - 1 - j)) & 1) as u8).collect())
        })
    }

    /// True when every point of `[self]` is below every point of `[other]`.
    pub fn is_lexicographically_before(&self, other: &Word) -> bool {
        let n = self.len().min(other.len());
        match (0..n).find(|&i| self.0[i] != other.0[i]) {
            Some(i) => self.0[i] < other.0[i],
            None => false,
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = if s == "ε" { "" } else { s };
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::MalformedInput(format!("bad digit {other:?} in word {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand used across the crate's tests.
pub fn w(s: &str) -> Word {
    s.parse().expect("valid word literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_roots() {
        assert_eq!(w("0101").primitive_root(), w("01"));
        assert_eq!(w("010").primitive_root(), w("010"));
        assert_eq!(w("1111").primitive_root(), w("1"));
    }

    #[test]
    fn rotations() {
        assert_eq!(w("011").rotate_right(), w("101"));
        assert_eq!(w("011").rotate_left(1), w("110"));
        assert_eq!(w("110").least_rotation(), w("011"));
    }

    #[test]
    fn rejects_bad_digits() {
        assert!("012".parse::<Word>().is_err());
        assert_eq!("ε".parse::<Word>().unwrap(), Word::empty());
    }

    #[test]
    fn enumerates_in_lex_order() {
        let all: Vec<_> = Word::all_of_length(2).map(|x| x.to_string()).collect();
        assert_eq!(all, ["00", "01", "10", "11"]);
    }

    #[test]
    fn cone_ordering() {
        assert!(w("01").is_lexicographically_before(&w("1")));
        assert!(!w("0").is_lexicographically_before(&w("01")));
    }
}
