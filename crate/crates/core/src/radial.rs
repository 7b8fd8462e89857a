//! Radial partitions of a punctured cone into cones shrinking to the puncture.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::EpPoint;
use crate::word::Word;

/// Side of the center a piece lies on: `Left` pieces are below it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }

    /// Digit of the center at a position where a piece on this side branches off.
    pub fn center_digit(self) -> u8 {
        match self {
            Side::Left => 1,
            Side::Right => 0,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Index of a radial piece. Unordered schemes number pieces by depth; ordered
/// schemes number each side separately.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PieceIndex {
    Depth(usize),
    Sided(Side, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RadialScheme {
    pub base: Word,
    pub center: EpPoint,
    pub ordered: bool,
}

impl RadialScheme {
    pub fn new(base: Word, center: EpPoint, ordered: bool) -> Result<Self> {
        if !center.in_cone(&base) {
            return Err(Error::Domain(format!("center {center} lies outside [{base}]")));
        }
        if ordered && center.in_q() {
            return Err(Error::Unsupported(format!(
                "ordered radial scheme around {center}, which has an immediate neighbour"
            )));
        }
        Ok(RadialScheme { base, center, ordered })
    }

    /// Unordered piece `C_m = [center↾(|base|+m) ⌢ flip]`.
    pub fn depth_piece(&self, m: usize) -> Word {
        let j = self.base.len() + m;
        let mut s = self.center.prefix(j);
        s.push(1 - self.center.digit(j));
        s
    }

    /// Position where the `k`-th piece on `side` branches off the center.
    pub fn branch_position(&self, side: Side, k: usize) -> Option<usize> {
        self.center.nth_position(self.base.len(), side.center_digit(), k)
    }

    /// Ordered piece: the `k`-th cone on `side`, counted outward-in from the base.
    pub fn sided_piece(&self, side: Side, k: usize) -> Option<Word> {
        self.branch_position(side, k).map(|j| {
            let mut s = self.center.prefix(j);
            s.push(1 - side.center_digit());
            s
        })
    }

    pub fn piece(&self, idx: PieceIndex) -> Option<Word> {
        match idx {
            PieceIndex::Depth(m) => Some(self.depth_piece(m)),
            PieceIndex::Sided(side, k) => self.sided_piece(side, k),
        }
    }

    /// Which piece holds `x`; `None` for the center or points outside the base.
    pub fn locate(&self, x: &EpPoint) -> Option<PieceIndex> {
        if !x.in_cone(&self.base) {
            return None;
        }
        let j = x.divergence(&self.center)?;
        let b = self.base.len();
        if !self.ordered {
            return Some(PieceIndex::Depth(j - b));
        }
        let side = if self.center.digit(j) == 1 { Side::Left } else { Side::Right };
        Some(PieceIndex::Sided(side, self.center.count_digit(b, j, side.center_digit())))
    }

    /// The first `count` pieces. Ordered schemes alternate sides, left first.
    pub fn materialize(&self, count: usize) -> Vec<(PieceIndex, Word)> {
        if !self.ordered {
            return (0..count).map(|m| (PieceIndex::Depth(m), self.depth_piece(m))).collect();
        }
        (0..count)
            .filter_map(|i| {
                let side = if i % 2 == 0 { Side::Left } else { Side::Right };
                let idx = PieceIndex::Sided(side, i / 2);
                self.piece(idx).map(|w| (idx, w))
            })
            .collect()
    }
}

/// Partition `[base] ∖ {center}` radially and return the first `count` pieces.
pub fn radial_partition(
    base: Word,
    center: EpPoint,
    ordered: bool,
    count: usize,
) -> Result<(RadialScheme, Vec<Word>)> {
    let scheme = RadialScheme::new(base, center, ordered)?;
    let pieces = scheme.materialize(count).into_iter().map(|(_, w)| w).collect();
    Ok((scheme, pieces))
}
