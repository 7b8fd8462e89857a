use super::{Cell, ConePiece, PiecewiseConeHomeo, SingularAssignment};
use crate::error::Result;
use crate::point::EpPoint;
use crate::word::Word;

/// Cell count past which composition stops refining and defers.
pub const COMPOSE_CELL_CAP: usize = 1 << 14;

/// `g ∘ h`, either refined to a single piecewise map or kept as a chain that is
/// evaluated map by map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComposedHomeo {
    Piecewise(PiecewiseConeHomeo),
    /// Maps in application order.
    Deferred(Vec<PiecewiseConeHomeo>),
}

impl ComposedHomeo {
    pub fn apply(&self, x: &EpPoint) -> Result<EpPoint> {
        match self {
            ComposedHomeo::Piecewise(h) => h.apply(x),
            ComposedHomeo::Deferred(chain) => chain.iter().try_fold(x.clone(), |y, h| h.apply(&y)),
        }
    }

    pub fn apply_inverse(&self, y: &EpPoint) -> Result<EpPoint> {
        match self {
            ComposedHomeo::Piecewise(h) => h.apply_inverse(y),
            ComposedHomeo::Deferred(chain) => chain.iter().rev().try_fold(y.clone(), |x, h| h.apply_inverse(&x)),
        }
    }

    pub fn inverse(&self) -> ComposedHomeo {
        match self {
            ComposedHomeo::Piecewise(h) => ComposedHomeo::Piecewise(h.inverse()),
            ComposedHomeo::Deferred(chain) => {
                ComposedHomeo::Deferred(chain.iter().rev().map(PiecewiseConeHomeo::inverse).collect())
            }
        }
    }

    pub fn as_piecewise(&self) -> Option<&PiecewiseConeHomeo> {
        match self {
            ComposedHomeo::Piecewise(h) => Some(h),
            ComposedHomeo::Deferred(_) => None,
        }
    }
}

/// `g ∘ h`: apply `h`, then `g`.
pub fn compose(g: &PiecewiseConeHomeo, h: &PiecewiseConeHomeo) -> ComposedHomeo {
    match refine(g, h) {
        Some(cells) if cells.len() <= COMPOSE_CELL_CAP => match PiecewiseConeHomeo::from_cells(cells) {
            Ok(m) => ComposedHomeo::Piecewise(m),
            Err(_) => ComposedHomeo::Deferred(vec![h.clone(), g.clone()]),
        },
        _ => ComposedHomeo::Deferred(vec![h.clone(), g.clone()]),
    }
}

fn refine(g: &PiecewiseConeHomeo, h: &PiecewiseConeHomeo) -> Option<Vec<Cell>> {
    let mut out = Vec::new();
    for cell in h.cells() {
        match cell {
            Cell::Piece(c) => {
                for r in restrict(g, &c.target)? {
                    out.push(pull_back(r, &c.target, &c.source));
                    if out.len() > COMPOSE_CELL_CAP {
                        return None;
                    }
                }
            }
            Cell::Singular(s) => {
                let mut r = restrict(g, &s.base_q)?;
                let Some(Cell::Piece(c)) = r.pop().filter(|_| r.is_empty()) else { return None };
                let mut t = s.clone();
                t.base_q = c.target.clone();
                t.q = c.apply(&s.q);
                out.push(Cell::Singular(t));
            }
        }
    }
    Some(out)
}

/// Cells of `g` restricted to `[t]`, when that restriction is again a finite
/// cell structure on `[t]`.
fn restrict(g: &PiecewiseConeHomeo, t: &Word) -> Option<Vec<Cell>> {
    let inner = || -> Vec<Cell> {
        g.cells
            .range(t.clone()..)
            .take_while(|(w, _)| t.is_prefix_of(w))
            .map(|(_, c)| c.clone())
            .collect()
    };
    match g.cell_containing_word(t) {
        None => Some(inner()),
        Some(Cell::Piece(c)) => Some(vec![Cell::Piece(ConePiece::new(t.clone(), c.image_word(t)))]),
        Some(Cell::Singular(s)) if s.base_p == *t => Some(inner()),
        Some(Cell::Singular(s)) => {
            let src = s.source_scheme();
            let probe = (s.base_p.len()..t.len()).find(|&i| t.digit(i) != s.p.digit(i));
            match probe {
                None if s.ordered() => None,
                None => {
                    let depth = t.len() - s.base_p.len();
                    let mut r = SingularAssignment::new(
                        t.clone(),
                        s.p.clone(),
                        s.q.prefix(s.base_q.len() + depth),
                        s.q.clone(),
                        s.mode,
                    );
                    r.skip = [0, 0];
                    Some(vec![Cell::Singular(r)])
                }
                Some(_) => {
                    let x = EpPoint::constant_tail(t, 0);
                    let idx = src.locate(&x)?;
                    if s.owns(idx) {
                        let pair = s.piece_pair(idx)?;
                        Some(vec![Cell::Piece(ConePiece::new(t.clone(), pair.image_word(t)))])
                    } else {
                        Some(inner())
                    }
                }
            }
        }
    }
}

/// Re-anchor a cell living inside `[from]` to the matching place inside `[to]`.
fn pull_back(c: Cell, from: &Word, to: &Word) -> Cell {
    let move_word = |w: &Word| to.concat(&w.suffix_from(from.len()));
    match c {
        Cell::Piece(p) => Cell::Piece(ConePiece::new(move_word(&p.source), p.target)),
        Cell::Singular(mut s) => {
            s.base_p = move_word(&s.base_p);
            s.p = s.p.translate(from, to);
            Cell::Singular(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conemap::Mode;
    use crate::point::pt;
    use crate::word::w;

    fn map(pairs: &[(&str, &str)]) -> PiecewiseConeHomeo {
        PiecewiseConeHomeo::new(pairs.iter().map(|(s, t)| ConePiece::new(w(s), w(t))).collect(), vec![]).unwrap()
    }

    fn samples() -> Vec<EpPoint> {
        let mut v = Vec::new();
        for n in 0..6 {
            for word in Word::all_of_length(n) {
                for tail in ["(0)", "(1)", "(01)", "(011)", "1(001)"] {
                    v.push(pt(&format!("{word}{tail}")));
                }
            }
        }
        v
    }

    #[test]
    fn swap_squared_is_identity() {
        let s = map(&[("0", "1"), ("1", "0")]);
        assert_eq!(s.inverse(), s);
        let c = compose(&s, &s);
        let m = c.as_piecewise().unwrap();
        for x in samples() {
            assert_eq!(m.apply(&x).unwrap(), x);
        }
    }

    #[test]
    fn map_with_its_inverse() {
        let h = map(&[("0", "11"), ("10", "0"), ("11", "10")]);
        let c = compose(&h.inverse(), &h);
        assert!(c.as_piecewise().is_some());
        for x in samples() {
            assert_eq!(c.apply(&x).unwrap().prefix(16), x.prefix(16));
            assert_eq!(c.apply(&x).unwrap(), x);
        }
    }

    #[test]
    fn agrees_with_sequential_application() {
        let h = map(&[("0", "11"), ("10", "0"), ("11", "10")]);
        let g = PiecewiseConeHomeo::new(
            vec![ConePiece::new(w("1"), w("0"))],
            vec![SingularAssignment::new(w("0"), pt("0(01)"), w("1"), pt("1(001)"), Mode::Unordered)],
        )
        .unwrap();
        let o = PiecewiseConeHomeo::new(
            vec![],
            vec![SingularAssignment::new(w(""), pt("(01)"), w(""), pt("(011)"), Mode::Ordered)],
        )
        .unwrap();
        for (a, b) in [(&g, &h), (&h, &g), (&g, &g), (&o, &h), (&h, &o), (&o, &o)] {
            let c = compose(a, b);
            for x in samples() {
                let y = a.apply(&b.apply(&x).unwrap()).unwrap();
                assert_eq!(c.apply(&x).unwrap(), y);
                assert_eq!(c.apply_inverse(&y).unwrap(), x);
            }
        }
        assert!(matches!(compose(&o, &o), ComposedHomeo::Deferred(_)));
        assert!(matches!(compose(&g, &h), ComposedHomeo::Piecewise(_)));
    }
}
