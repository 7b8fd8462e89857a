use std::collections::BTreeMap;

use super::{Cell, PiecewiseConeHomeo, SingularAssignment};
use crate::certificate::Failure;
use crate::radial::{PieceIndex, RadialScheme, Side};
use crate::word::Word;

pub use crate::certificate::{Certificate, ClauseVerdict};

/// Check the map structurally and its modulus of continuity down to depth `depth`.
pub fn validate(h: &PiecewiseConeHomeo, depth: usize) -> Certificate {
    let mut cert = Certificate::new();
    let radial = check_radial(h);
    let partition = if radial.is_ok() { check_structure(h) } else { Ok(()) };
    cert.record("partition", partition.clone());
    cert.record("radial-consistency", radial.clone());
    if radial.is_ok() && partition.is_ok() {
        cert.record("monotonicity", check_monotonicity(h));
        cert.record("modulus", check_modulus(h, depth));
    } else {
        let skipped = Err(Failure::new("not-checked", "structure invalid"));
        cert.record("monotonicity", skipped.clone());
        cert.record("modulus", skipped);
    }
    cert
}

/// Sources tile `2^ω`, and so do targets.
pub(crate) fn check_structure(h: &PiecewiseConeHomeo) -> Result<(), Failure> {
    check_radial(h)?;
    let sources: Vec<(Word, Vec<Word>)> =
        h.cells().map(|c| (c.source().clone(), c.skipped_sources())).collect();
    tiles(sources).map_err(|w| Failure::new("not-a-partition", format!("sources: {w}")))?;
    let targets: Vec<(Word, Vec<Word>)> = h
        .cells()
        .map(|c| (c.target().clone(), c.as_singular().map(|s| s.skipped_targets()).unwrap_or_default()))
        .collect();
    tiles(targets).map_err(|w| Failure::new("not-a-partition", format!("targets: {w}")))
}

/// Regions `[w] ∖ ⋃ holes` tile `2^ω` exactly when nesting only happens inside
/// holes and the measures add up to one.
fn tiles(mut regions: Vec<(Word, Vec<Word>)>) -> Result<(), String> {
    regions.sort();
    for pair in regions.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(format!("[{}] used twice", pair[0].0));
        }
    }
    let mut stack: Vec<&(Word, Vec<Word>)> = Vec::new();
    for r in &regions {
        while stack.last().is_some_and(|top| !top.0.is_prefix_of(&r.0)) {
            stack.pop();
        }
        if let Some(outer) = stack.last() {
            if !outer.1.iter().any(|hole| hole.is_prefix_of(&r.0)) {
                return Err(format!("[{}] overlaps [{}]", r.0, outer.0));
            }
        }
        stack.push(r);
    }
    let mut mass: BTreeMap<usize, i128> = BTreeMap::new();
    for (w, holes) in &regions {
        *mass.entry(w.len()).or_default() += 1;
        for hole in holes {
            *mass.entry(hole.len()).or_default() -= 1;
        }
    }
    let deepest = mass.keys().next_back().copied().unwrap_or(0);
    for len in (1..=deepest).rev() {
        let c = mass.remove(&len).unwrap_or(0);
        if c.rem_euclid(2) != 0 {
            return Err(format!("cones of length {len} leave a gap"));
        }
        *mass.entry(len - 1).or_default() += c / 2;
    }
    match mass.get(&0).copied().unwrap_or(0) {
        1 => Ok(()),
        0 => Err("regions leave a gap".into()),
        n if n < 1 => Err("regions leave a gap".into()),
        _ => Err("regions overlap".into()),
    }
}

fn check_radial(h: &PiecewiseConeHomeo) -> Result<(), Failure> {
    for s in h.singulars() {
        let bad = |why: String| Failure::new("bad-radial-scheme", format!("{} ↦ {}: {why}", s.p, s.q));
        RadialScheme::new(s.base_p.clone(), s.p.clone(), s.ordered()).map_err(|e| bad(e.to_string()))?;
        RadialScheme::new(s.base_q.clone(), s.q.clone(), s.ordered()).map_err(|e| bad(e.to_string()))?;
        if !s.ordered() && s.skip != [0, 0] {
            return Err(bad("unordered scheme delegates pieces".into()));
        }
    }
    Ok(())
}

/// Side of `w` relative to the center of `s` on the given side of the map.
fn side_of(w: &Word, center: &crate::point::EpPoint) -> Option<Side> {
    (0..w.len()).find(|&i| w.digit(i) != center.digit(i)).map(|i| {
        if w.digit(i) == 0 {
            Side::Left
        } else {
            Side::Right
        }
    })
}

/// Cells nested inside an ordered singular keep their side of the center.
fn check_monotonicity(h: &PiecewiseConeHomeo) -> Result<(), Failure> {
    for s in h.singulars().filter(|s| s.ordered()) {
        for c in nested_cells(h, s) {
            let src = side_of(c.source(), &s.p);
            let tgt = side_of(c.target(), &s.q);
            if src.is_none() || src != tgt {
                return Err(Failure::new(
                    "monotonicity",
                    format!("[{}] ↦ [{}] crosses sides at {} ↦ {}", c.source(), c.target(), s.p, s.q),
                ));
            }
        }
    }
    Ok(())
}

fn nested_cells<'a>(h: &'a PiecewiseConeHomeo, s: &'a SingularAssignment) -> impl Iterator<Item = &'a Cell> {
    h.cells.range(s.base_p.clone()..).skip(1).take_while(|(w, _)| s.base_p.is_prefix_of(w)).map(|(_, c)| c)
}

fn common_prefix(a: &Word, b: &Word) -> Word {
    let n = (0..a.len().min(b.len())).find(|&i| a.digit(i) != b.digit(i)).unwrap_or(a.len().min(b.len()));
    a.prefix(n)
}

/// Smallest cone holding the image of `[w]`.
pub fn image_hull(h: &PiecewiseConeHomeo, w: &Word) -> Option<Word> {
    let mut parts: Vec<Word> = Vec::new();
    match h.cell_containing_word(w) {
        Some(Cell::Piece(c)) => return Some(c.image_word(w)),
        Some(Cell::Singular(s)) => {
            let j = (s.base_p.len()..w.len()).find(|&i| w.digit(i) != s.p.digit(i));
            match j {
                Some(j) => {
                    let idx = if s.ordered() {
                        let side = if s.p.digit(j) == 1 { Side::Left } else { Side::Right };
                        PieceIndex::Sided(side, s.p.count_digit(s.base_p.len(), j, side.center_digit()))
                    } else {
                        PieceIndex::Depth(j - s.base_p.len())
                    };
                    if s.owns(idx) {
                        let pair = s.piece_pair(idx)?;
                        return Some(pair.image_word(w));
                    }
                }
                None => parts.push(center_hull(s, w.len())?),
            }
        }
        None => {}
    }
    let inner = h.cells.range(w.clone()..).take_while(|(v, _)| w.is_prefix_of(v)).filter(|(v, _)| *v != w);
    parts.extend(inner.map(|(_, c)| c.target().clone()));
    let mut it = parts.into_iter();
    let first = it.next()?;
    Some(it.fold(first, |acc, t| common_prefix(&acc, &t)))
}

/// Hull of the image of the lazily carried part of `[p↾k]`.
fn center_hull(s: &SingularAssignment, k: usize) -> Option<Word> {
    let (u, v) = (s.base_p.len(), s.base_q.len());
    if !s.ordered() {
        return Some(s.q.prefix(v + k - u));
    }
    let l = s.p.count_digit(u, k, 1).max(s.skip[0]);
    let r = s.p.count_digit(u, k, 0).max(s.skip[1]);
    let pl = s.q.nth_position(v, 1, l)?;
    let pr = s.q.nth_position(v, 0, r)?;
    Some(s.q.prefix(pl.min(pr)))
}

/// Distortion constant: deepest source word, or the largest length drop of any
/// piece that reaches depth `depth`, whichever is larger.
pub fn distortion(h: &PiecewiseConeHomeo, depth: usize) -> i64 {
    let mut c = 0i64;
    for cell in h.cells() {
        c = c.max(cell.source().len() as i64);
        match cell {
            Cell::Piece(p) => c = c.max(p.source.len() as i64 - p.target.len() as i64),
            Cell::Singular(s) if !s.ordered() => c = c.max(s.base_p.len() as i64 - s.base_q.len() as i64),
            Cell::Singular(s) => {
                let (src, tgt) = (s.source_scheme(), s.target_scheme());
                for side in [Side::Left, Side::Right] {
                    for k in 0.. {
                        let (Some(a), Some(b)) = (src.sided_piece(side, k), tgt.sided_piece(side, k)) else {
                            break;
                        };
                        c = c.max(a.len() as i64 - b.len() as i64);
                        if a.len() > depth + 1 {
                            break;
                        }
                    }
                }
            }
        }
    }
    c
}

/// Images of depth-`k` atoms are nested in their parents' images and have
/// diameter at most `2^-(k-c)`.
fn check_modulus(h: &PiecewiseConeHomeo, depth: usize) -> Result<(), Failure> {
    let c = distortion(h, depth);
    let mut level = vec![(Word::empty(), Word::empty())];
    for k in 0..=depth {
        let mut next = Vec::new();
        for (w, parent_hull) in &level {
            let hull = image_hull(h, w).ok_or_else(|| Failure::new("modulus", format!("[{w}] has no image")))?;
            if !parent_hull.is_prefix_of(&hull) {
                return Err(Failure::new("modulus", format!("image of [{w}] escapes its parent's image")));
            }
            if (hull.len() as i64) < k as i64 - c {
                return Err(Failure::new(
                    "modulus",
                    format!("image of [{w}] lies only in [{hull}], coarser than 2^-({k}-{c})"),
                ));
            }
            if k < depth {
                next.push((w.child(0), hull.clone()));
                next.push((w.child(1), hull));
            }
        }
        level = next;
    }
    Ok(())
}
