//! Knaster–Reichbach covers for finite anchor sets.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Failure};
use crate::clopen::{is_partition, ClopenSet};
use crate::conemap::{image_hull, Cell, ConePiece, Mode, PiecewiseConeHomeo, SingularAssignment};
use crate::error::{Error, Result};
use crate::point::EpPoint;
use crate::radial::RadialScheme;
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Plain,
    Ordered,
}

impl Regime {
    pub fn mode(self) -> Mode {
        match self {
            Regime::Plain => Mode::Unordered,
            Regime::Ordered => Mode::Ordered,
        }
    }
}

/// Radial pieces around `center_u` inside `[base_u]`, matched index-wise with
/// those around `center_v` inside `[base_v]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadialPair {
    pub center_u: EpPoint,
    pub base_u: Word,
    pub center_v: EpPoint,
    pub base_v: Word,
}

/// Partitions of `2^ω∖A` and `2^ω∖B` into cones, matched by `alpha`.
/// `pieces_u[i]` corresponds to `pieces_v[alpha[i]]`; radial pieces are matched
/// through `radial`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KRCover {
    #[serde(rename = "A")]
    pub a: Vec<EpPoint>,
    #[serde(rename = "B")]
    pub b: Vec<EpPoint>,
    pub h: Vec<(EpPoint, EpPoint)>,
    pub regime: Regime,
    pub radial: Vec<RadialPair>,
    #[serde(rename = "pieces_U")]
    pub pieces_u: Vec<Word>,
    #[serde(rename = "pieces_V")]
    pub pieces_v: Vec<Word>,
    pub alpha: Vec<usize>,
    pub min_depth: usize,
    /// Linear modulus constant; `None` means the pointwise check is used.
    pub constant_c: Option<i64>,
}

/// Modulus constant declared by plain covers.
pub const PLAIN_CONSTANT: i64 = 2;

/// Split every cone shorter than `depth` into its extensions of that length.
fn split_to_depth(words: Vec<Word>, depth: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for w in words {
        if w.len() >= depth {
            out.push(w);
        } else {
            out.extend(Word::all_of_length(depth - w.len()).map(|z| w.concat(&z)));
        }
    }
    out.sort();
    out
}

/// Pad the shorter family by splitting its lexicographically last cone.
fn balance(u: &mut Vec<Word>, v: &mut Vec<Word>) {
    while u.len() != v.len() {
        let short = if u.len() < v.len() { &mut *u } else { &mut *v };
        let last = short.pop().expect("both families are nonempty");
        short.push(last.child(0));
        short.push(last.child(1));
        short.sort();
    }
}

/// Build a cover for `a[i] ↦ b[i]`.
pub fn build_kr_cover(a: &[EpPoint], b: &[EpPoint], regime: Regime, min_depth: usize) -> Result<KRCover> {
    if a.len() != b.len() {
        return Err(Error::CardinalityMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::Domain("anchor set is empty".into()));
    }
    let mut pairs: Vec<(EpPoint, EpPoint)> = a.iter().cloned().zip(b.iter().cloned()).collect();
    pairs.sort();
    let distinct = |xs: Vec<&EpPoint>| xs.iter().collect::<BTreeSet<_>>().len() == xs.len();
    if !distinct(pairs.iter().map(|p| &p.0).collect()) || !distinct(pairs.iter().map(|p| &p.1).collect()) {
        return Err(Error::Domain("anchor map is not a bijection".into()));
    }
    if regime == Regime::Ordered {
        if let Some((x, _)) = pairs.iter().find(|(x, y)| x.in_q() || y.in_q()) {
            return Err(Error::Unsupported(format!("ordered cover around {x}, which has an immediate neighbour")));
        }
        if pairs.windows(2).any(|w| w[0].1 >= w[1].1) {
            return Err(Error::Domain("ordered cover needs an order-preserving anchor map".into()));
        }
    }

    let level = min_depth.saturating_sub(1);
    let (depth, res_u, res_v) = (level..)
        .find_map(|l| {
            let bu: BTreeSet<Word> = pairs.iter().map(|p| p.0.prefix(l)).collect();
            let bv: BTreeSet<Word> = pairs.iter().map(|p| p.1.prefix(l)).collect();
            if bu.len() != pairs.len() || bv.len() != pairs.len() {
                return None;
            }
            let ru = ClopenSet::normalize(bu).complement();
            let rv = ClopenSet::normalize(bv).complement();
            (ru.is_empty() == rv.is_empty()).then(|| (l, ru.words().to_vec(), rv.words().to_vec()))
        })
        .expect("anchors separate at some finite depth");

    let mut pieces_u = split_to_depth(res_u, min_depth);
    let mut pieces_v = split_to_depth(res_v, min_depth);
    if !pieces_u.is_empty() {
        balance(&mut pieces_u, &mut pieces_v);
    }
    let alpha = (0..pieces_u.len()).collect();
    let radial = pairs
        .iter()
        .map(|(x, y)| RadialPair {
            center_u: x.clone(),
            base_u: x.prefix(depth),
            center_v: y.clone(),
            base_v: y.prefix(depth),
        })
        .collect();
    Ok(KRCover {
        a: pairs.iter().map(|p| p.0.clone()).collect(),
        b: pairs.iter().map(|p| p.1.clone()).collect(),
        h: pairs,
        regime,
        radial,
        pieces_u,
        pieces_v,
        alpha,
        min_depth,
        constant_c: (regime == Regime::Plain).then_some(PLAIN_CONSTANT),
    })
}

impl KRCover {
    /// Image of an anchor under the declared bijection.
    pub fn anchor_image(&self, x: &EpPoint) -> Option<&EpPoint> {
        self.h.iter().find(|(p, _)| p == x).map(|(_, q)| q)
    }

    /// The matched residual pairs.
    pub fn residual_pairs(&self) -> impl Iterator<Item = (&Word, &Word)> {
        self.pieces_u.iter().zip(&self.alpha).map(|(u, &j)| (u, &self.pieces_v[j]))
    }

    /// Split every residual piece and its partner into children; the result is
    /// again a cover.
    pub fn refine_residuals(&self) -> KRCover {
        let mut pieces_u = Vec::new();
        let mut pieces_v = Vec::new();
        for (u, v) in self.residual_pairs() {
            for d in [0, 1] {
                pieces_u.push(u.child(d));
                pieces_v.push(v.child(d));
            }
        }
        KRCover {
            alpha: (0..pieces_u.len()).collect(),
            pieces_u,
            pieces_v,
            min_depth: self.min_depth + 1,
            ..self.clone()
        }
    }
}

/// The pasting of `h` with per-piece maps; residual pieces without an entry use
/// the canonical cone translation onto their partner.
pub fn combination_map(c: &KRCover, per_piece: &BTreeMap<Word, Vec<ConePiece>>) -> Result<PiecewiseConeHomeo> {
    let mut cells = Vec::new();
    for (u, v) in c.residual_pairs() {
        match per_piece.get(u) {
            None => cells.push(Cell::Piece(ConePiece::new(u.clone(), v.clone()))),
            Some(maps) => {
                for m in maps {
                    if !u.is_prefix_of(&m.source) || !v.is_prefix_of(&m.target) {
                        return Err(Error::InvalidMap(format!(
                            "[{}] → [{}] does not map [{u}] into [{v}]",
                            m.source, m.target
                        )));
                    }
                    cells.push(Cell::Piece(m.clone()));
                }
            }
        }
    }
    if let Some(extra) = per_piece.keys().find(|k| !c.pieces_u.contains(k)) {
        return Err(Error::InvalidMap(format!("[{extra}] is not a residual piece")));
    }
    for r in &c.radial {
        cells.push(Cell::Singular(SingularAssignment::new(
            r.base_u.clone(),
            r.center_u.clone(),
            r.base_v.clone(),
            r.center_v.clone(),
            c.regime.mode(),
        )));
    }
    PiecewiseConeHomeo::from_cells(cells)
}

/// Check clauses (1)–(3) exactly and (4) by modulus down to depth `depth`.
pub fn verify_kr_cover(c: &KRCover, depth: usize) -> Certificate {
    let mut cert = Certificate::new();
    cert.record("(1)", check_side(c, Side::U));
    cert.record("(2)", check_side(c, Side::V));
    cert.record("(3)", check_bijection(c));
    let four = if cert.passed() { check_continuity(c, depth) } else { Err(Failure::new("not-checked", "(1)–(3) failed")) };
    cert.record("(4)", four);
    cert
}

#[derive(Clone, Copy)]
enum Side {
    U,
    V,
}

fn check_side(c: &KRCover, side: Side) -> std::result::Result<(), Failure> {
    let (anchors, pieces): (&[EpPoint], &[Word]) = match side {
        Side::U => (&c.a, &c.pieces_u),
        Side::V => (&c.b, &c.pieces_v),
    };
    let radial: Vec<(&Word, &EpPoint)> = c
        .radial
        .iter()
        .map(|r| match side {
            Side::U => (&r.base_u, &r.center_u),
            Side::V => (&r.base_v, &r.center_v),
        })
        .collect();
    let fail = |w: String| Failure::new("not-a-partition", w);
    let mut words: Vec<Word> = pieces.to_vec();
    words.extend(radial.iter().map(|(b, _)| (*b).clone()));
    if !is_partition(&words) {
        return Err(fail(format!("pieces and radial bases {words:?} do not tile 2^ω")));
    }
    let centers: BTreeSet<&EpPoint> = radial.iter().map(|(_, x)| *x).collect();
    if centers.len() != radial.len() || centers != anchors.iter().collect() {
        return Err(fail("radial centers differ from the anchor set".into()));
    }
    for (base, x) in &radial {
        RadialScheme::new((*base).clone(), (*x).clone(), c.regime == Regime::Ordered)
            .map_err(|e| Failure::new("bad-radial-scheme", e.to_string()))?;
    }
    if c.min_depth > 0 {
        if let Some(p) = pieces.iter().find(|p| p.len() < c.min_depth) {
            return Err(Failure::new("too-coarse", format!("[{p}] is shorter than {}", c.min_depth)));
        }
    }
    Ok(())
}

fn check_bijection(c: &KRCover) -> std::result::Result<(), Failure> {
    let n = c.pieces_v.len();
    let image: BTreeSet<usize> = c.alpha.iter().copied().collect();
    if c.alpha.len() != c.pieces_u.len() || c.pieces_u.len() != n || image.len() != n || image.iter().any(|&j| j >= n) {
        return Err(Failure::new("not-a-bijection", format!("alpha {:?} on {} ↔ {} pieces", c.alpha, c.pieces_u.len(), n)));
    }
    Ok(())
}

/// Images of the pieces near each anchor crowd around its image.
fn check_continuity(c: &KRCover, depth: usize) -> std::result::Result<(), Failure> {
    let map = combination_map(c, &BTreeMap::new()).map_err(|e| Failure::new("(4)", e.to_string()))?;
    let inv = map.inverse();
    for r in &c.radial {
        let x = &r.center_u;
        let y = c.anchor_image(x).ok_or_else(|| Failure::new("(4)", format!("{x} has no declared image")))?;
        anchored_modulus(&map, x, &r.base_u, y, c.constant_c, depth)?;
        anchored_modulus(&inv, y, &base_around(c, y), x, c.constant_c, depth)?;
    }
    Ok(())
}

fn base_around(c: &KRCover, y: &EpPoint) -> Word {
    c.radial.iter().find(|r| r.center_v == *y).map(|r| r.base_v.clone()).unwrap_or_default()
}

/// At every scale `k ≤ depth` past the anchor's isolating cone, the image of
/// `[x↾j]` lies in `[y↾k]` for `j = k + c` (linear modulus) or for some `j`
/// (pointwise).
fn anchored_modulus(
    map: &PiecewiseConeHomeo,
    x: &EpPoint,
    base: &Word,
    y: &EpPoint,
    constant_c: Option<i64>,
    depth: usize,
) -> std::result::Result<(), Failure> {
    let start = base.len();
    let close = |j: usize, k: usize| image_hull(map, &x.prefix(j)).is_some_and(|hull| hull.len() >= k && y.in_cone(&hull));
    for k in start..=start.max(depth) {
        let ok = match constant_c {
            Some(c) => close((k as i64 + c).max(0) as usize, k),
            None => {
                let reach = start + (k + 2) * 2 * (x.preperiod().len() + x.period().len() + y.preperiod().len() + y.period().len());
                (k..=reach).any(|j| close(j, k))
            }
        };
        if !ok {
            return Err(Failure::new(
                "(4)",
                format!("pieces near {x} at scale 2^-{k} map outside [{}]", y.prefix(k)),
            ));
        }
    }
    Ok(())
}
