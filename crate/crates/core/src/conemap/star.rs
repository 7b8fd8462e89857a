use serde::{Deserialize, Serialize};

use super::ConePiece;
use crate::error::{Error, Result};
use crate::interval::IntervalDecomposition;
use crate::point::EpPoint;
use crate::tailclass::SetPresentation;
use crate::word::Word;

/// `[a,b] ⊆ 2^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedInterval {
    pub a: EpPoint,
    pub b: EpPoint,
}

impl ClosedInterval {
    pub fn new(a: EpPoint, b: EpPoint) -> Self {
        ClosedInterval { a, b }
    }

    /// The cone `[w]` as the interval `[w0^ω, w1^ω]`.
    pub fn cone(w: &Word) -> Self {
        ClosedInterval { a: EpPoint::constant_tail(w, 0), b: EpPoint::constant_tail(w, 1) }
    }

    pub fn contains(&self, x: &EpPoint) -> bool {
        self.a <= *x && *x <= self.b
    }

    /// `Some(w)` when the interval is exactly the cone `[w]`.
    pub fn as_cone(&self) -> Option<Word> {
        let j = self.a.divergence(&self.b)?;
        let w = self.a.prefix(j);
        (ClosedInterval::cone(&w) == *self).then_some(w)
    }
}

/// Order isomorphism `[a,b] → [c,d]` sending the `n`-th cone of one interval
/// decomposition onto the `n`-th cone of the other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarOrderIso {
    pub source: IntervalDecomposition,
    pub target: IntervalDecomposition,
}

/// Build the matched-decomposition isomorphism `I → J`. Since every piece is a
/// cone translation it carries `I∩W` onto `J∩W` for saturated `W`.
pub fn star_order_iso(
    i: &ClosedInterval,
    j: &ClosedInterval,
    w: &SetPresentation,
    window: usize,
) -> Result<StarOrderIso> {
    if !w.is_saturated() {
        return Err(Error::Unsupported("order isomorphism needs a saturated set".into()));
    }
    Ok(StarOrderIso {
        source: IntervalDecomposition::new(&i.a, &i.b, window)?,
        target: IntervalDecomposition::new(&j.a, &j.b, window)?,
    })
}

impl StarOrderIso {
    pub fn source_interval(&self) -> ClosedInterval {
        ClosedInterval::new(self.source.a.clone(), self.source.b.clone())
    }

    pub fn target_interval(&self) -> ClosedInterval {
        ClosedInterval::new(self.target.a.clone(), self.target.b.clone())
    }

    pub fn apply(&self, x: &EpPoint) -> Result<EpPoint> {
        Self::map(&self.source, &self.target, x)
    }

    pub fn apply_inverse(&self, y: &EpPoint) -> Result<EpPoint> {
        Self::map(&self.target, &self.source, y)
    }

    fn map(from: &IntervalDecomposition, to: &IntervalDecomposition, x: &EpPoint) -> Result<EpPoint> {
        if *x == from.a {
            return Ok(to.a.clone());
        }
        if *x == from.b {
            return Ok(to.b.clone());
        }
        let n = from.locate(x).ok_or_else(|| Error::Domain(format!("{x} lies outside [{}, {}]", from.a, from.b)))?;
        Ok(x.translate(&from.piece(n), &to.piece(n)))
    }

    /// Matched pieces `(s_n, t_n)` for the materialized window.
    pub fn pieces(&self) -> Vec<ConePiece> {
        let lo = self.source.first_index();
        (lo..=-lo - 1).map(|n| ConePiece::new(self.source.piece(n), self.target.piece(n))).collect()
    }

    /// When both intervals are cones the isomorphism is a single cone translation.
    pub fn as_cone_piece(&self) -> Option<ConePiece> {
        Some(ConePiece::new(self.source_interval().as_cone()?, self.target_interval().as_cone()?))
    }
}
