//! Tail-equivalence classes and finitely presented saturated sets.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::EpPoint;
use crate::word::Word;

/// A tail-equivalence class of eventually periodic points, named by the least
/// rotation of its primitive period.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Word", into = "Word")]
pub struct TailClass {
    necklace: Word,
}

impl TailClass {
    pub fn of(x: &EpPoint) -> Self {
        TailClass { necklace: x.necklace() }
    }

    /// Class of `(v)^ω`; `v` need not be primitive or least.
    pub fn from_period(v: &Word) -> Result<Self> {
        Ok(Self::of(&EpPoint::periodic(v)?))
    }

    pub fn necklace(&self) -> &Word {
        &self.necklace
    }

    pub fn representative(&self) -> EpPoint {
        EpPoint::periodic(&self.necklace).expect("necklace is nonempty")
    }

    pub fn contains(&self, x: &EpPoint) -> bool {
        x.necklace() == self.necklace
    }

    pub fn is_q(&self) -> bool {
        self.necklace.len() == 1
    }

    /// The first `n` members in the order `(|w|, w lex)` over `w⌢rep`, duplicates dropped.
    pub fn enumerate(&self, n: usize) -> Vec<EpPoint> {
        self.members().take(n).collect()
    }

    pub fn members(&self) -> ClassMembers {
        ClassMembers::new(self.representative())
    }
}

impl Ord for TailClass {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.necklace.len(), &self.necklace).cmp(&(other.necklace.len(), &other.necklace))
    }
}

impl PartialOrd for TailClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Word> for TailClass {
    type Error = Error;
    fn try_from(v: Word) -> Result<Self> {
        let c = TailClass::from_period(&v)?;
        if c.necklace != v {
            return Err(Error::MalformedInput(format!(
                "class name {v} is not a primitive least rotation (use {})",
                c.necklace
            )));
        }
        Ok(c)
    }
}

impl From<TailClass> for Word {
    fn from(c: TailClass) -> Word {
        c.necklace
    }
}

impl fmt::Display for TailClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[({})]", self.necklace)
    }
}

impl fmt::Debug for TailClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Lazily enumerates `w⌢rep` for words `w` in length-lexicographic order.
pub struct ClassMembers {
    rep: EpPoint,
    len: usize,
    index: u64,
    seen: HashSet<EpPoint>,
}

impl ClassMembers {
    fn new(rep: EpPoint) -> Self {
        ClassMembers { rep, len: 0, index: 0, seen: HashSet::new() }
    }
}

impl Iterator for ClassMembers {
    type Item = EpPoint;

    fn next(&mut self) -> Option<EpPoint> {
        loop {
            if self.index >= 1u64 << self.len {
                self.len += 1;
                self.index = 0;
            }
            let n = self.len;
            let i = self.index;
            self.index += 1;
            let w = Word::from_digits_unchecked((0..n).map(|j| ((i >> (n - 1 - j)) & 1) as u8).collect());
            let x = self.rep.prepend(&w);
            if self.seen.insert(x.clone()) {
                return Some(x);
            }
        }
    }
}

/// Primitive necklaces (Lyndon words) in length-lexicographic order:
/// `0, 1, 01, 001, 011, 0001, …`. Each names one tail class.
pub fn lyndon_words() -> impl Iterator<Item = Word> {
    (1usize..).flat_map(|n| {
        Word::all_of_length(n).filter(|v| v.primitive_root().len() == v.len() && v.least_rotation() == *v)
    })
}

pub fn all_classes() -> impl Iterator<Item = TailClass> {
    lyndon_words().map(|necklace| TailClass { necklace })
}

/// A countable subset of `2^ω` given by a finite description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SetPresentation {
    /// Union of the listed classes, kept sorted and duplicate-free.
    Classes { classes: Vec<TailClass> },
    /// Every eventually periodic point outside the listed classes.
    AllExcept { excluded: Vec<TailClass> },
    /// A finite explicit list of points.
    Explicit { points: Vec<EpPoint> },
}

impl SetPresentation {
    pub fn classes(classes: impl IntoIterator<Item = TailClass>) -> Self {
        let mut v: Vec<_> = classes.into_iter().collect();
        v.sort();
        v.dedup();
        SetPresentation::Classes { classes: v }
    }

    pub fn all() -> Self {
        SetPresentation::AllExcept { excluded: Vec::new() }
    }

    pub fn all_except(excluded: impl IntoIterator<Item = TailClass>) -> Self {
        let mut v: Vec<_> = excluded.into_iter().collect();
        v.sort();
        v.dedup();
        SetPresentation::AllExcept { excluded: v }
    }

    pub fn is_saturated(&self) -> bool {
        !matches!(self, SetPresentation::Explicit { .. })
    }

    pub fn contains(&self, x: &EpPoint) -> bool {
        self.contains_class(&TailClass::of(x)) && match self {
            SetPresentation::Explicit { points } => points.contains(x),
            _ => true,
        }
    }

    /// For saturated sets, whether the class lies inside; for explicit sets,
    /// whether some listed point is in the class.
    pub fn contains_class(&self, c: &TailClass) -> bool {
        match self {
            SetPresentation::Classes { classes } => classes.binary_search(c).is_ok(),
            SetPresentation::AllExcept { excluded } => excluded.binary_search(c).is_err(),
            SetPresentation::Explicit { points } => points.iter().any(|p| c.contains(p)),
        }
    }

    /// Classes of a saturated presentation, in canonical order. Infinite for `AllExcept`.
    pub fn class_iter(&self) -> Box<dyn Iterator<Item = TailClass> + '_> {
        match self {
            SetPresentation::Classes { classes } => Box::new(classes.iter().cloned()),
            SetPresentation::AllExcept { excluded } => {
                Box::new(all_classes().filter(move |c| excluded.binary_search(c).is_err()))
            }
            SetPresentation::Explicit { points } => {
                let mut v: Vec<_> = points.iter().map(TailClass::of).collect();
                v.sort();
                v.dedup();
                Box::new(v.into_iter())
            }
        }
    }

    /// Whether the presentation has at least `n` classes.
    pub fn has_at_least_classes(&self, n: usize) -> bool {
        self.class_iter().take(n).count() == n
    }

    /// Deterministic injective enumeration of the presented set.
    pub fn points(&self) -> PointEnumerator {
        PointEnumerator::new(self.clone())
    }

    pub fn enumerate(&self, n: usize) -> Vec<EpPoint> {
        self.points().take(n).collect()
    }

    /// Every cone of length `depth` meets the first `window` enumerated points.
    pub fn dense_to_depth(&self, depth: usize, window: usize) -> bool {
        let pts = self.enumerate(window);
        Word::all_of_length(depth).all(|s| pts.iter().any(|p| p.in_cone(&s)))
    }

    pub fn union(&self, other: &SetPresentation) -> Result<SetPresentation> {
        use SetPresentation::*;
        Ok(match (self, other) {
            (Classes { classes: a }, Classes { classes: b }) => Self::classes(a.iter().chain(b).cloned()),
            (AllExcept { excluded }, Classes { classes }) | (Classes { classes }, AllExcept { excluded }) => {
                Self::all_except(excluded.iter().filter(|c| classes.binary_search(c).is_err()).cloned())
            }
            (AllExcept { excluded: a }, AllExcept { excluded: b }) => {
                Self::all_except(a.iter().filter(|c| b.binary_search(c).is_ok()).cloned())
            }
            _ => return Err(Error::Unsupported("union with an explicit enumeration".into())),
        })
    }

    /// `self ∖ other` for saturated presentations.
    pub fn difference(&self, other: &SetPresentation) -> Result<SetPresentation> {
        use SetPresentation::*;
        Ok(match (self, other) {
            (Classes { classes }, o) if o.is_saturated() => {
                Self::classes(classes.iter().filter(|c| !o.contains_class(c)).cloned())
            }
            (AllExcept { excluded }, Classes { classes }) => {
                Self::all_except(excluded.iter().chain(classes).cloned())
            }
            (AllExcept { .. }, AllExcept { excluded }) => {
                Self::classes(excluded.iter().filter(|c| self.contains_class(c)).cloned())
            }
            _ => return Err(Error::Unsupported("difference with an explicit enumeration".into())),
        })
    }
}

/// Saturation of a finite generator list.
pub fn saturate(gens: &[EpPoint]) -> Result<SetPresentation> {
    if gens.is_empty() {
        return Err(Error::Domain("saturation needs at least one generator".into()));
    }
    Ok(SetPresentation::classes(gens.iter().map(TailClass::of)))
}

/// Round-robin over finitely many classes, or a diagonal dovetail over infinitely many.
pub struct PointEnumerator {
    source: Box<dyn Iterator<Item = TailClass>>,
    finite: bool,
    streams: Vec<ClassMembers>,
    exhausted_classes: bool,
    diagonal: usize,
    cursor: usize,
    explicit: Option<std::vec::IntoIter<EpPoint>>,
}

impl PointEnumerator {
    fn new(set: SetPresentation) -> Self {
        let (source, finite, explicit): (Box<dyn Iterator<Item = TailClass>>, bool, _) = match set {
            SetPresentation::Classes { classes } => (Box::new(classes.into_iter()), true, None),
            SetPresentation::AllExcept { excluded } => (
                Box::new(all_classes().filter(move |c| excluded.binary_search(c).is_err())),
                false,
                None,
            ),
            SetPresentation::Explicit { points } => (Box::new(std::iter::empty()), true, Some(points.into_iter())),
        };
        let mut e = PointEnumerator {
            source,
            finite,
            streams: Vec::new(),
            exhausted_classes: false,
            diagonal: 0,
            cursor: 0,
            explicit,
        };
        if finite {
            for c in e.source.by_ref() {
                e.streams.push(c.members());
            }
            e.exhausted_classes = true;
        }
        e
    }
}

impl Iterator for PointEnumerator {
    type Item = EpPoint;

    fn next(&mut self) -> Option<EpPoint> {
        if let Some(it) = self.explicit.as_mut() {
            return it.next();
        }
        if self.finite {
            if self.streams.is_empty() {
                return None;
            }
            let i = self.cursor % self.streams.len();
            self.cursor += 1;
            return self.streams[i].next();
        }
        // diagonal d visits (class i, member d-i) for i = 0..=d
        loop {
            if self.cursor > self.diagonal {
                self.diagonal += 1;
                self.cursor = 0;
            }
            let i = self.cursor;
            self.cursor += 1;
            while self.streams.len() <= i && !self.exhausted_classes {
                match self.source.next() {
                    Some(c) => self.streams.push(c.members()),
                    None => self.exhausted_classes = true,
                }
            }
            if i < self.streams.len() {
                return self.streams[i].next();
            }
            if self.streams.is_empty() {
                return None;
            }
        }
    }
}
