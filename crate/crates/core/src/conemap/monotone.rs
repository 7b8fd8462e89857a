use serde::{Deserialize, Serialize};

use super::{Cell, PiecewiseConeHomeo, SingularAssignment};
use crate::error::{Error, Result};
use crate::point::EpPoint;
use crate::radial::{PieceIndex, Side};
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Increasing,
    Decreasing,
}

/// Outcome of the local monotonicity test at a point `x`: when monotone,
/// `f[(a,x)]` and `f[(x,b)]` lie on the sides of `f(x)` given by `orientation`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneVerdict {
    pub monotone: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Orientation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<(EpPoint, EpPoint)>,
}

impl MonotoneVerdict {
    fn yes(orientation: Orientation, a: EpPoint, b: EpPoint) -> Self {
        MonotoneVerdict { monotone: true, orientation: Some(orientation), witness: Some((a, b)) }
    }

    fn no() -> Self {
        MonotoneVerdict { monotone: false, orientation: None, witness: None }
    }

    pub fn increasing(&self) -> bool {
        self.orientation == Some(Orientation::Increasing)
    }
}

/// Left witness inside the cone `[c]` holding `x`; the predecessor when `x` is
/// the cone's least point.
fn left_end(c: &Word, x: &EpPoint) -> EpPoint {
    let a = EpPoint::constant_tail(c, 0);
    if a == *x {
        x.predecessor().expect("x is not least")
    } else {
        a
    }
}

fn right_end(c: &Word, x: &EpPoint) -> EpPoint {
    let b = EpPoint::constant_tail(c, 1);
    if b == *x {
        x.successor().expect("x is not greatest")
    } else {
        b
    }
}

pub fn monotone_at(h: &PiecewiseConeHomeo, x: &EpPoint) -> Result<MonotoneVerdict> {
    if x.is_least() || x.is_greatest() {
        return Err(Error::Domain(format!("{x} is an endpoint of 2^ω")));
    }
    let cell = h.cell_for(x).ok_or_else(|| Error::InvalidMap(format!("no cell holds {x}")))?;
    let cone = match cell {
        Cell::Piece(c) => c.source.clone(),
        Cell::Singular(s) if *x == s.p => return Ok(at_center(s, x)),
        Cell::Singular(s) => {
            let idx = s
                .source_scheme()
                .locate(x)
                .filter(|&i| s.owns(i))
                .ok_or_else(|| Error::InvalidMap(format!("{x} falls in a delegated piece")))?;
            s.source_scheme().piece(idx).expect("located piece exists")
        }
    };
    Ok(MonotoneVerdict::yes(Orientation::Increasing, left_end(&cone, x), right_end(&cone, x)))
}

fn at_center(s: &SingularAssignment, x: &EpPoint) -> MonotoneVerdict {
    let src = s.source_scheme();
    if s.ordered() {
        // lazily carried pieces match sides; delegated ones lie outside the witnesses
        let l = src.piece(PieceIndex::Sided(Side::Left, s.skip[0])).expect("ordered centers avoid Q");
        let r = src.piece(PieceIndex::Sided(Side::Right, s.skip[1])).expect("ordered centers avoid Q");
        return MonotoneVerdict::yes(
            Orientation::Increasing,
            EpPoint::constant_tail(&l, 0),
            EpPoint::constant_tail(&r, 1),
        );
    }
    let (u, v) = (s.base_p.len(), s.base_q.len());
    let bound = s.p.preperiod().len()
        + s.q.preperiod().len()
        + crate::point::lcm(s.p.period().len(), s.q.period().len())
        + 1;
    let (pt, qt) = (s.p.shift(u), s.q.shift(v));
    let (orientation, m) = if pt.tails_eventually_agree(0, &qt, 0) {
        let m = (0..=bound).find(|&m| pt.shift(m) == qt.shift(m));
        (Orientation::Increasing, m)
    } else if pt.tails_eventually_complementary(0, &qt, 0) {
        let m = (0..=bound).find(|&m| pt.shift(m) == qt.shift(m).complement());
        (Orientation::Decreasing, m)
    } else {
        return MonotoneVerdict::no();
    };
    let Some(m) = m else { return MonotoneVerdict::no() };
    let c = s.p.prefix(u + m);
    MonotoneVerdict::yes(orientation, left_end(&c, x), right_end(&c, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conemap::{ConePiece, Mode};
    use crate::point::pt;
    use crate::word::w;

    /// Sample points strictly inside `(a,b)` near both ends and at `x`.
    fn check_witness(h: &PiecewiseConeHomeo, x: &EpPoint, v: &MonotoneVerdict) {
        let (a, b) = v.witness.clone().unwrap();
        assert!(a < *x && *x < b);
        let fx = h.apply(x).unwrap();
        let inc = v.increasing();
        for k in 0..40 {
            for tail in ["(0)", "(1)", "(01)", "(001)"] {
                let y = pt(&format!("{}{}", x.prefix(k), tail));
                let fy = h.apply(&y).unwrap();
                if a < y && y < *x {
                    assert_eq!(fy < fx, inc, "left sample {y}");
                }
                if *x < y && y < b {
                    assert_eq!(fy > fx, inc, "right sample {y}");
                }
            }
        }
    }

    #[test]
    fn translations_are_increasing() {
        let h = PiecewiseConeHomeo::new(
            vec![ConePiece::new(w("0"), w("1")), ConePiece::new(w("1"), w("0"))],
            vec![],
        )
        .unwrap();
        for x in ["01(0)", "(01)", "1(0)", "0(1)"] {
            let v = monotone_at(&h, &pt(x)).unwrap();
            assert!(v.monotone && v.increasing());
            check_witness(&h, &pt(x), &v);
        }
    }

    #[test]
    fn ordered_center_is_increasing() {
        let h = PiecewiseConeHomeo::new(
            vec![],
            vec![SingularAssignment::new(w(""), pt("(01)"), w(""), pt("(011)"), Mode::Ordered)],
        )
        .unwrap();
        let v = monotone_at(&h, &pt("(01)")).unwrap();
        assert!(v.monotone && v.increasing());
        check_witness(&h, &pt("(01)"), &v);
    }

    #[test]
    fn unordered_center_crossing_sides_is_not_monotone() {
        let h = PiecewiseConeHomeo::new(
            vec![],
            vec![SingularAssignment::new(w(""), pt("(01)"), w(""), pt("(001)"), Mode::Unordered)],
        )
        .unwrap();
        let v = monotone_at(&h, &pt("(01)")).unwrap();
        assert!(!v.monotone);
        // violating pair: at depth 2 the center digit is 0 (right piece) while the
        // target digit is 1 (left piece)
        let y = pt("000(1)");
        let z = pt("1(0)");
        let (p, fp) = (pt("(01)"), pt("(001)"));
        assert!(y < p && h.apply(&y).unwrap() > fp || z > p && h.apply(&z).unwrap() < fp);
    }

    #[test]
    fn unordered_center_with_matching_tails() {
        let h = PiecewiseConeHomeo::new(
            vec![],
            vec![SingularAssignment::new(w(""), pt("(01)"), w(""), pt("11(01)"), Mode::Unordered)],
        )
        .unwrap();
        let v = monotone_at(&h, &pt("(01)")).unwrap();
        assert!(v.monotone && v.increasing());
        check_witness(&h, &pt("(01)"), &v);
        let d = PiecewiseConeHomeo::new(
            vec![],
            vec![SingularAssignment::new(w(""), pt("(01)"), w(""), pt("(10)"), Mode::Unordered)],
        )
        .unwrap();
        let v = monotone_at(&d, &pt("(01)")).unwrap();
        assert_eq!(v.orientation, Some(Orientation::Decreasing));
        check_witness(&d, &pt("(01)"), &v);
    }

    #[test]
    fn endpoints_rejected() {
        let h = PiecewiseConeHomeo::identity();
        assert!(monotone_at(&h, &pt("(0)")).is_err());
        let s = PiecewiseConeHomeo::new(
            vec![ConePiece::new(w("0"), w("1")), ConePiece::new(w("1"), w("0"))],
            vec![],
        )
        .unwrap();
        // least point of a piece: the left witness is its predecessor
        let v = monotone_at(&s, &pt("1(0)")).unwrap();
        assert_eq!(v.witness.unwrap().0, pt("0(1)"));
    }
}
