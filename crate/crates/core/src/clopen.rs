//! Clopen subsets of `2^ω` as canonical finite antichains of cones.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::point::EpPoint;
use crate::word::Word;

/// Sorted, prefix-free, sibling-reduced list of cone words.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClopenSet {
    cones: Vec<Word>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombineMode {
    Union,
    Intersection,
    Difference,
    ComplementOfA,
}

/// `[s] ∖ [t]` for `s ⊑ t`: the siblings along the path from `s` down to `t`.
pub fn cone_minus_subcone(s: &Word, t: &Word) -> Vec<Word> {
    debug_assert!(s.is_prefix_of(t));
    (s.len()..t.len()).map(|i| t.prefix(i + 1).sibling()).collect()
}

impl ClopenSet {
    pub fn empty() -> Self {
        ClopenSet::default()
    }

    pub fn whole() -> Self {
        ClopenSet { cones: vec![Word::empty()] }
    }

    pub fn cone(s: Word) -> Self {
        ClopenSet { cones: vec![s] }
    }

    pub fn normalize(words: impl IntoIterator<Item = Word>) -> Self {
        let mut set: BTreeSet<Word> = words.into_iter().collect();
        loop {
            // drop words that extend another member
            let snapshot: Vec<Word> = set.iter().cloned().collect();
            let mut kept: Vec<Word> = Vec::with_capacity(snapshot.len());
            for s in snapshot {
                if kept.last().is_some_and(|k| k.is_prefix_of(&s)) {
                    continue;
                }
                kept.push(s);
            }
            // merge sibling pairs s0, s1 into s
            let mut merged = BTreeSet::new();
            let mut changed = false;
            let mut i = 0;
            while i < kept.len() {
                let s = &kept[i];
                if s.last() == Some(0) && i + 1 < kept.len() && kept[i + 1] == s.sibling() {
                    merged.insert(s.prefix(s.len() - 1));
                    changed = true;
                    i += 2;
                } else {
                    merged.insert(s.clone());
                    i += 1;
                }
            }
            set = merged;
            if !changed {
                return ClopenSet { cones: set.into_iter().collect() };
            }
        }
    }

    pub fn words(&self) -> &[Word] {
        &self.cones
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.cones.len() == 1 && self.cones[0].is_empty()
    }

    pub fn member(&self, x: &EpPoint) -> bool {
        self.cones.iter().any(|s| x.in_cone(s))
    }

    /// Whether the cone `[t]` lies inside the set. Canonical form means some
    /// member must be a prefix of `t`.
    pub fn contains_cone(&self, t: &Word) -> bool {
        self.cones.iter().any(|s| s.is_prefix_of(t))
    }

    pub fn union(&self, other: &ClopenSet) -> ClopenSet {
        ClopenSet::normalize(self.cones.iter().chain(&other.cones).cloned())
    }

    pub fn intersection(&self, other: &ClopenSet) -> ClopenSet {
        let mut out = Vec::new();
        for s in &self.cones {
            for t in &other.cones {
                if s.is_prefix_of(t) {
                    out.push(t.clone());
                } else if t.is_prefix_of(s) {
                    out.push(s.clone());
                }
            }
        }
        ClopenSet::normalize(out)
    }

    pub fn difference(&self, other: &ClopenSet) -> ClopenSet {
        let mut current: Vec<Word> = self.cones.clone();
        for t in &other.cones {
            let mut next = Vec::new();
            for s in current {
                if t.is_prefix_of(&s) {
                    continue;
                } else if s.is_prefix_of(t) {
                    next.extend(cone_minus_subcone(&s, t));
                } else {
                    next.push(s);
                }
            }
            current = next;
        }
        ClopenSet::normalize(current)
    }

    pub fn complement(&self) -> ClopenSet {
        ClopenSet::whole().difference(self)
    }

    pub fn combine(&self, other: &ClopenSet, mode: CombineMode) -> ClopenSet {
        match mode {
            CombineMode::Union => self.union(other),
            CombineMode::Intersection => self.intersection(other),
            CombineMode::Difference => self.difference(other),
            CombineMode::ComplementOfA => self.complement(),
        }
    }

    pub fn is_disjoint(&self, other: &ClopenSet) -> bool {
        self.intersection(other).is_empty()
    }

    /// Length of the longest cone word.
    pub fn depth(&self) -> usize {
        self.cones.iter().map(Word::len).max().unwrap_or(0)
    }
}

/// Whether the words are pairwise incomparable and their cones cover `2^ω`.
pub fn is_partition(words: &[Word]) -> bool {
    let mut sorted: Vec<&Word> = words.iter().collect();
    sorted.sort();
    let antichain = sorted.windows(2).all(|p| !p[0].is_prefix_of(p[1]));
    antichain && ClopenSet::normalize(words.iter().cloned()).is_whole()
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cones.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.cones.iter().map(|s| format!("[{s}]")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
