//! The double arrow space `𝔸(X)`: `2^ω` with every point of `X` split in two,
//! ordered lexicographically, and the maps of it induced by homeomorphisms of
//! `2^ω` that are monotone at the split points.

mod ordered;
mod pipeline;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::conemap::{monotone_at, Orientation, PiecewiseConeHomeo};
use crate::error::{Error, Result};
use crate::point::{EpPoint, QClass};
use crate::tailclass::SetPresentation;

pub use ordered::{ordered_synthesize, OrderedInstance, OrderedPolicy};
pub use pipeline::{
    arrow_cdh_synthesize, certify_arrow, sample_arrow_points, ArrowEvaluation, ArrowInstance, ArrowPipeline,
    ArrowSet, LiftedHomeo, SidedClass,
};

/// `⟨base, side⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArrowPoint {
    pub base: EpPoint,
    pub side: u8,
}

impl ArrowPoint {
    pub fn new(base: EpPoint, side: u8) -> Self {
        ArrowPoint { base, side }
    }
}

impl PartialOrd for ArrowPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ArrowPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.base, self.side).cmp(&(&other.base, other.side))
    }
}

impl fmt::Display for ArrowPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{},{}⟩", self.base, self.side)
    }
}

/// `𝔸(X)` for a set `X` avoiding `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowPresentation {
    #[serde(rename = "X")]
    pub x: SetPresentation,
}

fn meets_q(x: &SetPresentation) -> bool {
    x.class_iter().take(2).any(|c| c.is_q() && x.contains_class(&c))
        || matches!(x, SetPresentation::Explicit { points } if points.iter().any(EpPoint::in_q))
}

impl ArrowPresentation {
    pub fn new(x: SetPresentation) -> Result<Self> {
        let q_hit = match &x {
            // the Q classes come first in canonical order
            SetPresentation::AllExcept { excluded } => excluded.iter().filter(|c| c.is_q()).count() < 2,
            _ => meets_q(&x),
        };
        if q_hit {
            return Err(Error::Domain("the doubled set must avoid Q".into()));
        }
        Ok(ArrowPresentation { x })
    }

    /// `𝔸(∅)`, which is `2^ω` itself.
    pub fn cantor() -> Self {
        ArrowPresentation { x: SetPresentation::classes([]) }
    }

    pub fn contains(&self, p: &ArrowPoint) -> bool {
        let q0 = p.base.classify_q() == QClass::Q0;
        match p.side {
            0 => !q0,
            1 => q0 || self.x.contains(&p.base),
            _ => false,
        }
    }

    pub fn check(&self, p: &ArrowPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::Domain(format!("{p} is not a point of the double arrow space")))
        }
    }

    /// Whether `x` appears with both sides.
    pub fn doubled(&self, x: &EpPoint) -> bool {
        self.x.contains(x)
    }

    /// The unique point over a base that is not doubled.
    pub fn single(&self, x: &EpPoint) -> ArrowPoint {
        let side = u8::from(x.classify_q() == QClass::Q0);
        ArrowPoint::new(x.clone(), side)
    }

    /// Every point over `x`, in order.
    pub fn fiber(&self, x: &EpPoint) -> Vec<ArrowPoint> {
        if self.doubled(x) {
            vec![ArrowPoint::new(x.clone(), 0), ArrowPoint::new(x.clone(), 1)]
        } else {
            vec![self.single(x)]
        }
    }

    pub fn compare(&self, p: &ArrowPoint, q: &ArrowPoint) -> Result<Ordering> {
        self.check(p)?;
        self.check(q)?;
        Ok(p.cmp(q))
    }
}

pub fn arrow_compare(carrier: &ArrowPresentation, p: &ArrowPoint, q: &ArrowPoint) -> Result<Ordering> {
    carrier.compare(p, q)
}

/// `X ⊆ Y` for presentations that can be compared class by class.
fn subset(x: &SetPresentation, y: &SetPresentation) -> Result<bool> {
    match x {
        SetPresentation::Explicit { points } => Ok(points.iter().all(|p| y.contains(p))),
        SetPresentation::Classes { classes } => Ok(classes.iter().all(|c| y.contains_class(c))),
        SetPresentation::AllExcept { .. } => match y {
            SetPresentation::AllExcept { excluded } => Ok(excluded.iter().all(|c| !x.contains_class(c))),
            _ => Ok(false),
        },
    }
}

/// `π^Y_X`: forget the split over `Y∖X`.
pub fn arrow_project(p: &ArrowPoint, from_y: &ArrowPresentation, to_x: &ArrowPresentation) -> Result<ArrowPoint> {
    if !subset(&to_x.x, &from_y.x)? {
        return Err(Error::Domain("projection needs X ⊆ Y".into()));
    }
    from_y.check(p)?;
    if from_y.doubled(&p.base) && !to_x.doubled(&p.base) {
        Ok(ArrowPoint::new(p.base.clone(), 0))
    } else {
        Ok(p.clone())
    }
}

/// The map of `𝔸(X)` induced by a homeomorphism `g` of `2^ω` that keeps `X` and
/// is monotone at each point of it: `⟨x,t⟩ ↦ ⟨g(x), t⟩`, with the side flipped
/// where `g` reverses order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowMap {
    pub base: PiecewiseConeHomeo,
    pub carrier: ArrowPresentation,
    /// Singular points of `base` in `X` where `base` reverses order.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub reversed: BTreeMap<EpPoint, EpPoint>,
}

impl ArrowMap {
    /// `g` acting on `𝔸(∅) = 2^ω`.
    pub fn on_cantor(base: PiecewiseConeHomeo) -> Self {
        ArrowMap { base, carrier: ArrowPresentation::cantor(), reversed: BTreeMap::new() }
    }

    pub fn identity() -> Self {
        Self::on_cantor(PiecewiseConeHomeo::identity())
    }

    pub fn apply(&self, p: &ArrowPoint) -> Result<ArrowPoint> {
        self.carrier.check(p)?;
        let y = self.base.apply(&p.base)?;
        if !self.carrier.doubled(&p.base) {
            return Ok(self.carrier.single(&y));
        }
        let side = if self.reversed.contains_key(&p.base) { 1 - p.side } else { p.side };
        Ok(ArrowPoint::new(y, side))
    }

    pub fn apply_inverse(&self, q: &ArrowPoint) -> Result<ArrowPoint> {
        self.carrier.check(q)?;
        let x = self.base.apply_inverse(&q.base)?;
        if !self.carrier.doubled(&x) {
            return Ok(self.carrier.single(&x));
        }
        let side = if self.reversed.contains_key(&x) { 1 - q.side } else { q.side };
        Ok(ArrowPoint::new(x, side))
    }
}

/// Extend `h` on `𝔸(X)` to `H` on `𝔸(Y)` with `π^Y_X ∘ H = h ∘ π^Y_X`.
///
/// Cone translations keep tail classes and are increasing, so only the finitely
/// many singular points of the base map need checking.
pub fn lift(h: &ArrowMap, y: &ArrowPresentation) -> Result<ArrowMap> {
    let x = &h.carrier.x;
    if !y.x.is_saturated() || !x.is_saturated() {
        return Err(Error::Unsupported("lifting needs saturated presentations".into()));
    }
    if !subset(x, &y.x)? {
        return Err(Error::Domain("lift needs X ⊆ Y".into()));
    }
    let added = |p: &EpPoint| y.x.contains(p) && !x.contains(p);
    let mut reversed = h.reversed.clone();
    for s in h.base.singulars() {
        if added(&s.p) != added(&s.q) {
            return Err(Error::LiftRejected {
                point: format!("⟨{},0⟩", s.p),
                reason: format!("image {} breaks h[(Y∖X)×{{0}}] = (Y∖X)×{{0}}", s.q),
            });
        }
        if !added(&s.p) {
            continue;
        }
        let v = monotone_at(&h.base, &s.p)?;
        match v.orientation {
            Some(Orientation::Increasing) if v.monotone => {}
            Some(Orientation::Decreasing) if v.monotone => {
                reversed.insert(s.p.clone(), s.q.clone());
            }
            _ => {
                return Err(Error::LiftRejected {
                    point: format!("⟨{},0⟩", s.p),
                    reason: "the map is not monotone there".into(),
                })
            }
        }
    }
    Ok(ArrowMap { base: h.base.clone(), carrier: y.clone(), reversed })
}
