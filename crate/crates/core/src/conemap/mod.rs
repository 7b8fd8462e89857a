//! Self-homeomorphisms of `2^ω` built from cone translations `h_{s,t}` and
//! finitely many singular points glued by radial schemes.

mod compose;
mod monotone;
mod star;
mod validate;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::EpPoint;
use crate::radial::{PieceIndex, RadialScheme, Side};
use crate::word::Word;

pub use compose::{compose, ComposedHomeo};
pub use monotone::{monotone_at, MonotoneVerdict, Orientation};
pub use star::{star_order_iso, ClosedInterval, StarOrderIso};
pub use validate::{distortion, image_hull, validate, Certificate, ClauseVerdict};

/// `h_{s,t}: [s] → [t]`, `s⌢z ↦ t⌢z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConePiece {
    pub source: Word,
    pub target: Word,
}

impl ConePiece {
    pub fn new(source: Word, target: Word) -> Self {
        ConePiece { source, target }
    }

    pub fn apply(&self, x: &EpPoint) -> EpPoint {
        x.translate(&self.source, &self.target)
    }

    pub fn inverse(&self) -> ConePiece {
        ConePiece { source: self.target.clone(), target: self.source.clone() }
    }

    /// Image of a subcone `[w] ⊆ [source]`.
    pub fn image_word(&self, w: &Word) -> Word {
        debug_assert!(self.source.is_prefix_of(w));
        self.target.concat(&w.suffix_from(self.source.len()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Unordered,
    Ordered,
}

/// A singular point `p ↦ q` with the punctured cone `[base_p] ∖ {p}` carried onto
/// `[base_q] ∖ {q}` piece by piece. Unordered schemes pair pieces by depth; ordered
/// schemes pair the `k`-th left (right) piece at `p` with the `k`-th left (right)
/// piece at `q`. In ordered mode the first `skip[side]` pieces on each side are
/// carried by other cells nested inside `[base_p]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SingularAssignment {
    pub p: EpPoint,
    pub q: EpPoint,
    pub mode: Mode,
    pub base_p: Word,
    pub base_q: Word,
    #[serde(default, skip_serializing_if = "is_zero_skip")]
    pub skip: [usize; 2],
}

fn is_zero_skip(s: &[usize; 2]) -> bool {
    *s == [0, 0]
}

impl SingularAssignment {
    pub fn new(base_p: Word, p: EpPoint, base_q: Word, q: EpPoint, mode: Mode) -> Self {
        SingularAssignment { p, q, mode, base_p, base_q, skip: [0, 0] }
    }

    pub fn ordered(&self) -> bool {
        self.mode == Mode::Ordered
    }

    pub fn source_scheme(&self) -> RadialScheme {
        RadialScheme { base: self.base_p.clone(), center: self.p.clone(), ordered: self.ordered() }
    }

    pub fn target_scheme(&self) -> RadialScheme {
        RadialScheme { base: self.base_q.clone(), center: self.q.clone(), ordered: self.ordered() }
    }

    pub fn inverse(&self) -> SingularAssignment {
        SingularAssignment {
            p: self.q.clone(),
            q: self.p.clone(),
            mode: self.mode,
            base_p: self.base_q.clone(),
            base_q: self.base_p.clone(),
            skip: self.skip,
        }
    }

    /// Radial piece pair `(source, target)` at `idx`.
    pub fn piece_pair(&self, idx: PieceIndex) -> Option<ConePiece> {
        Some(ConePiece::new(self.source_scheme().piece(idx)?, self.target_scheme().piece(idx)?))
    }

    /// Whether the piece at `idx` is carried by this cell rather than a nested one.
    pub fn owns(&self, idx: PieceIndex) -> bool {
        match idx {
            PieceIndex::Depth(_) => true,
            PieceIndex::Sided(side, k) => k >= self.skip[side.index()],
        }
    }

    /// Source words of the pieces delegated to nested cells.
    pub fn skipped_sources(&self) -> Vec<Word> {
        self.skipped(&self.source_scheme())
    }

    pub fn skipped_targets(&self) -> Vec<Word> {
        self.skipped(&self.target_scheme())
    }

    fn skipped(&self, scheme: &RadialScheme) -> Vec<Word> {
        [Side::Left, Side::Right]
            .into_iter()
            .flat_map(|side| (0..self.skip[side.index()]).filter_map(move |k| scheme.sided_piece(side, k)))
            .collect()
    }

    pub fn apply(&self, x: &EpPoint) -> Option<EpPoint> {
        if *x == self.p {
            return Some(self.q.clone());
        }
        let idx = self.source_scheme().locate(x)?;
        if !self.owns(idx) {
            return None;
        }
        Some(self.piece_pair(idx)?.apply(x))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cell {
    Piece(ConePiece),
    Singular(SingularAssignment),
}

impl Cell {
    pub fn source(&self) -> &Word {
        match self {
            Cell::Piece(c) => &c.source,
            Cell::Singular(s) => &s.base_p,
        }
    }

    pub fn target(&self) -> &Word {
        match self {
            Cell::Piece(c) => &c.target,
            Cell::Singular(s) => &s.base_q,
        }
    }

    pub fn inverse(&self) -> Cell {
        match self {
            Cell::Piece(c) => Cell::Piece(c.inverse()),
            Cell::Singular(s) => Cell::Singular(s.inverse()),
        }
    }

    pub fn as_singular(&self) -> Option<&SingularAssignment> {
        match self {
            Cell::Singular(s) => Some(s),
            Cell::Piece(_) => None,
        }
    }

    fn skipped_sources(&self) -> Vec<Word> {
        self.as_singular().map(|s| s.skipped_sources()).unwrap_or_default()
    }
}

/// A finite description of a self-homeomorphism of `2^ω`.
///
/// Cell source words form a partition of `2^ω`, except that cells may nest inside
/// the delegated pieces of an ordered singular cell; a point is handled by the cell
/// with the longest source word that is a prefix of it.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PiecewiseConeHomeo {
    cells: BTreeMap<Word, Cell>,
    by_target: BTreeMap<Word, Word>,
    max_source_len: usize,
    max_target_len: usize,
}

impl PiecewiseConeHomeo {
    pub fn identity() -> Self {
        Self::from_cells_unchecked(vec![Cell::Piece(ConePiece::new(Word::empty(), Word::empty()))])
    }

    /// Build and check that sources and targets tile `2^ω`.
    pub fn new(pieces: Vec<ConePiece>, singulars: Vec<SingularAssignment>) -> Result<Self> {
        let cells = pieces.into_iter().map(Cell::Piece).chain(singulars.into_iter().map(Cell::Singular));
        Self::from_cells(cells.collect())
    }

    pub fn from_cells(cells: Vec<Cell>) -> Result<Self> {
        let n = cells.len();
        let h = Self::from_cells_unchecked(cells);
        if h.cells.len() != n || h.by_target.len() != n {
            return Err(Error::InvalidMap("two cells share a source or target word".into()));
        }
        validate::check_structure(&h).map_err(|f| Error::InvalidMap(f.to_string()))?;
        Ok(h)
    }

    pub(crate) fn from_cells_unchecked(cells: Vec<Cell>) -> Self {
        let mut h = PiecewiseConeHomeo::default();
        for c in cells {
            h.insert(c);
        }
        h
    }

    pub(crate) fn insert(&mut self, c: Cell) {
        self.max_source_len = self.max_source_len.max(c.source().len());
        self.max_target_len = self.max_target_len.max(c.target().len());
        self.by_target.insert(c.target().clone(), c.source().clone());
        self.cells.insert(c.source().clone(), c);
    }

    pub(crate) fn remove(&mut self, source: &Word) -> Option<Cell> {
        let c = self.cells.remove(source)?;
        self.by_target.remove(c.target());
        Some(c)
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.values()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, source: &Word) -> Option<&Cell> {
        self.cells.get(source)
    }

    pub fn singulars(&self) -> impl Iterator<Item = &SingularAssignment> {
        self.cells.values().filter_map(Cell::as_singular)
    }

    pub fn pieces(&self) -> impl Iterator<Item = &ConePiece> {
        self.cells.values().filter_map(|c| match c {
            Cell::Piece(p) => Some(p),
            Cell::Singular(_) => None,
        })
    }

    /// Cell responsible for `x`: longest source word that is a prefix of `x`.
    pub fn cell_for(&self, x: &EpPoint) -> Option<&Cell> {
        (0..=self.max_source_len).rev().find_map(|n| self.cells.get(&x.prefix(n)))
    }

    /// Cell whose target region holds `y`.
    pub fn cell_for_target(&self, y: &EpPoint) -> Option<&Cell> {
        (0..=self.max_target_len)
            .rev()
            .find_map(|n| self.by_target.get(&y.prefix(n)).and_then(|s| self.cells.get(s)))
    }

    /// Innermost cell whose source word is a prefix of `w`.
    pub fn cell_containing_word(&self, w: &Word) -> Option<&Cell> {
        (0..=w.len().min(self.max_source_len)).rev().find_map(|n| self.cells.get(&w.prefix(n)))
    }

    pub fn cell_containing_target_word(&self, w: &Word) -> Option<&Cell> {
        (0..=w.len().min(self.max_target_len))
            .rev()
            .find_map(|n| self.by_target.get(&w.prefix(n)).and_then(|s| self.cells.get(s)))
    }

    pub fn apply(&self, x: &EpPoint) -> Result<EpPoint> {
        let cell = self.cell_for(x).ok_or_else(|| Error::InvalidMap(format!("no cell holds {x}")))?;
        match cell {
            Cell::Piece(c) => Ok(c.apply(x)),
            Cell::Singular(s) => s
                .apply(x)
                .ok_or_else(|| Error::InvalidMap(format!("{x} falls in a delegated piece with no nested cell"))),
        }
    }

    pub fn apply_inverse(&self, y: &EpPoint) -> Result<EpPoint> {
        let cell = self.cell_for_target(y).ok_or_else(|| Error::InvalidMap(format!("no cell covers {y}")))?;
        match cell.inverse() {
            Cell::Piece(c) => Ok(c.apply(y)),
            Cell::Singular(s) => s
                .apply(y)
                .ok_or_else(|| Error::InvalidMap(format!("{y} falls in a delegated piece with no nested cell"))),
        }
    }

    pub fn inverse(&self) -> PiecewiseConeHomeo {
        Self::from_cells_unchecked(self.cells.values().map(Cell::inverse).collect())
    }

    /// Singular points `p` of the map.
    pub fn singular_points(&self) -> impl Iterator<Item = &EpPoint> {
        self.singulars().map(|s| &s.p)
    }

    /// DOT rendering of the source partition tree.
    pub fn to_dot(&self) -> String {
        let mut nodes = std::collections::BTreeSet::new();
        for w in self.cells.keys() {
            for n in 0..=w.len() {
                nodes.insert(w.prefix(n));
            }
        }
        let name = |w: &Word| if w.is_empty() { "e".to_string() } else { format!("n{w}") };
        let mut out = String::from("digraph partition {\n  node [shape=box, fontname=monospace];\n");
        for w in &nodes {
            let label = match self.cells.get(w) {
                Some(Cell::Piece(c)) => format!("[{}] → [{}]", c.source, c.target),
                Some(Cell::Singular(s)) => format!("[{}] {} ↦ {} ({:?})", s.base_p, s.p, s.q, s.mode),
                None if w.is_empty() => "ε".to_string(),
                None => w.to_string(),
            };
            out.push_str(&format!("  {} [label=\"{}\"];\n", name(w), label));
            if !w.is_empty() {
                out.push_str(&format!("  {} -> {};\n", name(&w.prefix(w.len() - 1)), name(w)));
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Serialize, Deserialize)]
struct MapDoc {
    pieces: Vec<(Word, Word)>,
    singulars: Vec<SingularAssignment>,
}

impl Serialize for PiecewiseConeHomeo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapDoc {
            pieces: self.pieces().map(|c| (c.source.clone(), c.target.clone())).collect(),
            singulars: self.singulars().cloned().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiecewiseConeHomeo {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = MapDoc::deserialize(d)?;
        let pieces = doc.pieces.into_iter().map(|(s, t)| Cell::Piece(ConePiece::new(s, t)));
        let cells: Vec<Cell> = pieces.chain(doc.singulars.into_iter().map(Cell::Singular)).collect();
        // structure is checked by `validate`, so tampered documents still load
        Ok(PiecewiseConeHomeo::from_cells_unchecked(cells))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::pt;
    use crate::word::w;

    pub(crate) fn swap() -> PiecewiseConeHomeo {
        PiecewiseConeHomeo::new(
            vec![ConePiece::new(w("0"), w("1")), ConePiece::new(w("1"), w("0"))],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn rejects_non_partition_targets() {
        let r = PiecewiseConeHomeo::new(
            vec![
                ConePiece::new(w("0"), w("11")),
                ConePiece::new(w("10"), w("01")),
                ConePiece::new(w("11"), w("00")),
            ],
            vec![],
        );
        assert!(matches!(r, Err(Error::InvalidMap(_))));
    }

    #[test]
    fn swap_and_identity() {
        assert_eq!(swap().apply(&pt("0(01)")).unwrap(), pt("1(01)"));
        let id = PiecewiseConeHomeo::identity();
        assert_eq!(id.apply(&pt("01(011)")).unwrap(), pt("01(011)"));
    }

    #[test]
    fn singular_gluing() {
        let h = PiecewiseConeHomeo::new(
            vec![],
            vec![SingularAssignment::new(Word::empty(), pt("(0)"), Word::empty(), pt("(1)"), Mode::Unordered)],
        )
        .unwrap();
        // 001(0) lies in C_2 = [001], which is carried onto [110]
        let y = h.apply(&pt("001(0)")).unwrap();
        assert_eq!(y, pt("110(0)"));
        assert_eq!(y.prefix(12), w("110000000000"));
        assert_eq!(h.apply(&pt("(0)")).unwrap(), pt("(1)"));
        assert_eq!(h.apply_inverse(&y).unwrap(), pt("001(0)"));
    }

    #[test]
    fn serialization_round_trip() {
        let h = PiecewiseConeHomeo::new(
            vec![ConePiece::new(w("1"), w("1"))],
            vec![SingularAssignment::new(w("0"), pt("(01)"), w("0"), pt("0(001)"), Mode::Ordered)],
        )
        .unwrap();
        let s = serde_json::to_string(&h).unwrap();
        assert!(s.contains("\"pieces\"") && s.contains("\"base_p\""));
        let back: PiecewiseConeHomeo = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn dot_export_names_every_cell() {
        let dot = swap().to_dot();
        assert!(dot.contains("[0] → [1]") && dot.contains("[1] → [0]"));
    }
}
