use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{carrying_piece, piece_depth, EngineRun, EngineState, StagePolicy};
use crate::certificate::{Certificate, Failure};
use crate::conemap::{validate, Cell, ConePiece, Mode, PiecewiseConeHomeo};
use crate::point::EpPoint;
use crate::radial::{PieceIndex, Side};
use crate::tailclass::SetPresentation;
use crate::word::Word;

/// A requirement `h_n[S ∩ G^0_n] = T ∩ G^1_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransportedSet {
    pub name: String,
    pub source: SetPresentation,
    pub target: SetPresentation,
}

impl TransportedSet {
    pub fn new(name: &str, source: SetPresentation, target: SetPresentation) -> Self {
        TransportedSet { name: name.to_string(), source, target }
    }
}

type Check = Result<(), Failure>;

fn fail(clause: &str, msg: impl Into<String>) -> Check {
    Err(Failure::new(clause, msg))
}

/// Exact check of the stage conditions on every stage of `run`, plus sampled
/// checks of tail preservation and dense-set transport.
pub fn certify<P: StagePolicy + ?Sized>(run: &EngineRun, policy: &P, samples: usize) -> Certificate {
    let mut cert = Certificate::new();
    let stages = &run.stages;
    cert.record("(a)", check_a(stages, policy));
    cert.record("(b)", check_b(stages, policy));
    cert.record("(c)", stages.iter().try_for_each(|s| check_c(s, policy)));
    cert.record("(d)", check_d(stages));
    cert.record("(e)", stages.iter().try_for_each(check_e));
    let (mut f, mut h) = (Ok(()), Ok(()));
    for pair in stages.windows(2) {
        let (pf, ph) = certify_stage_pair(&pair[0], &pair[1]);
        if f.is_ok() {
            f = pf;
        }
        if h.is_ok() {
            h = ph;
        }
    }
    cert.record("(f)", f);
    cert.record("(g)", stages.iter().try_for_each(|s| check_g(s, samples, policy.mode())));
    cert.record("(h)", h);
    if let Some(w) = policy.monotone_set() {
        cert.record("(i)", check_i(stages, &w).map(|_| ()));
    }
    cert.record("cover", stages.iter().try_for_each(check_cover));
    cert.record("tail-preservation", check_tails(run.current(), samples));
    cert.record("dense-transport", check_transport(run.current(), policy, samples));
    cert
}

fn check_a<P: StagePolicy + ?Sized>(stages: &[EngineState], policy: &P) -> Check {
    for pair in stages.windows(2) {
        let (s, t) = (&pair[0], &pair[1]);
        let ks = policy.witness_points(s.n);
        for x in s.g0.iter().chain(&ks) {
            if !t.in_g0(x) {
                return fail("(a)", format!("{x} ∈ G^0_{} ∪ K_{} missing from G^0_{}", s.n, s.n, t.n));
            }
        }
        for x in s.g1.iter().chain(&ks) {
            if !t.in_g1(x) {
                return fail("(a)", format!("{x} ∈ G^1_{} ∪ K_{} missing from G^1_{}", s.n, s.n, t.n));
            }
        }
    }
    Ok(())
}

fn check_b<P: StagePolicy + ?Sized>(stages: &[EngineState], policy: &P) -> Check {
    for s in stages {
        for k in 0..s.n {
            let (d0, d1) = (policy.forward_point(k), policy.backward_point(k));
            if !s.in_g0(&d0) {
                return fail("(b)", format!("d_{k} = {d0} not in G^0_{}", s.n));
            }
            if !s.in_g1(&d1) {
                return fail("(b)", format!("d_{k} = {d1} not in G^1_{}", s.n));
            }
        }
    }
    Ok(())
}

fn check_c<P: StagePolicy + ?Sized>(s: &EngineState, policy: &P) -> Check {
    let mut image = Vec::new();
    for p in &s.g0 {
        image.push(s.map.apply(p).map_err(|e| Failure::new("(c)", e.to_string()))?);
    }
    image.sort();
    if image != s.g1 {
        return fail("(c)", format!("h_{}[G^0] ≠ G^1", s.n));
    }
    let sets = policy.transported_sets();
    for sg in s.map.singulars() {
        for t in &sets {
            if t.source.contains(&sg.p) != t.target.contains(&sg.q) {
                return fail(
                    "(c)",
                    format!("stage {}: {} ↦ {} breaks h[{n}∩G^0] = {n}∩G^1", s.n, sg.p, sg.q, n = t.name),
                );
            }
        }
    }
    Ok(())
}

fn check_d(stages: &[EngineState]) -> Check {
    for (n, s) in stages.iter().enumerate() {
        for earlier in &stages[..n] {
            for p in &earlier.g0 {
                let (a, b) = (s.map.apply(p), earlier.map.apply(p));
                if a.is_err() || a != b {
                    return fail("(d)", format!("h_{} and h_{} differ at {p}", s.n, earlier.n));
                }
            }
        }
    }
    Ok(())
}

/// First pieces of every cell, materialized.
fn sample_pieces(map: &PiecewiseConeHomeo) -> Vec<ConePiece> {
    let mut out = Vec::new();
    for c in map.cells() {
        match c {
            Cell::Piece(p) => out.push(p.clone()),
            Cell::Singular(s) => {
                let idxs: Vec<PieceIndex> = match s.mode {
                    Mode::Unordered => (0..3).map(PieceIndex::Depth).collect(),
                    Mode::Ordered => [Side::Left, Side::Right]
                        .into_iter()
                        .flat_map(|side| (0..2).map(move |j| PieceIndex::Sided(side, s.skip[side.index()] + j)))
                        .collect(),
                };
                out.extend(idxs.into_iter().filter_map(|i| s.piece_pair(i)));
            }
        }
    }
    out
}

fn check_e(s: &EngineState) -> Check {
    if s.n == 0 {
        return if s.map == PiecewiseConeHomeo::identity() { Ok(()) } else { fail("(e)", "stage 0 is not the identity") };
    }
    if s.depth != s.n + 1 {
        return fail("(e)", format!("stage {} has cover depth {}", s.n, s.depth));
    }
    for p in sample_pieces(&s.map) {
        let d = piece_depth(p.source.len(), p.target.len(), s.depth);
        let t = d + p.target.len() - p.source.len();
        if d < s.n + 1 || t < s.n + 1 {
            return fail("(e)", format!("piece of [{}] → [{}] has words of length {d}/{t}", p.source, p.target));
        }
    }
    Ok(())
}

/// Which word of `prev` carries the cone `[w]`, as a cone pair whose source is a
/// prefix of `w`.
fn prev_piece(prev: &PiecewiseConeHomeo, w: &Word) -> Option<ConePiece> {
    match prev.cell_containing_word(w)? {
        Cell::Piece(c) => Some(c.clone()),
        Cell::Singular(s) => {
            let j = (s.base_p.len()..w.len()).find(|&i| w.digit(i) != s.p.digit(i))?;
            let x = EpPoint::constant_tail(&w.prefix(j + 1), 0);
            carrying_piece(prev, &x).filter(|c| c.source.is_prefix_of(w))
        }
    }
}

/// Refinement (f) and the image compatibility (h) between consecutive stages:
/// every cell of `next` sits inside one cover piece of `prev` and agrees with
/// `prev`'s translation there, or continues a singular cell of `prev`.
pub fn certify_stage_pair(prev: &EngineState, next: &EngineState) -> (Check, Check) {
    if next.depth < prev.depth {
        return (fail("(f)", "cover depth decreased"), Ok(()));
    }
    for cell in next.map.cells() {
        match cell {
            Cell::Piece(c) => {
                let Some(p) = prev_piece(&prev.map, &c.source) else {
                    return (fail("(f)", format!("[{}] straddles pieces of stage {}", c.source, prev.n)), Ok(()));
                };
                // the stage-(n-1) cover piece holding [source], or the cell itself when
                // it is coarser than that piece and must then keep the old translation
                let d = piece_depth(p.source.len(), p.target.len(), prev.depth);
                let ok = if c.source.len() >= d {
                    p.image_word(&c.source.prefix(d)).is_prefix_of(&c.target)
                } else {
                    p.image_word(&c.source) == c.target
                };
                if !ok {
                    return (Ok(()), fail("(h)", format!("[{}] ↦ [{}] leaves its stage-{} image", c.source, c.target, prev.n)));
                }
            }
            Cell::Singular(s) => match prev.map.cell_containing_word(&s.base_p) {
                Some(Cell::Singular(o)) if o.p == s.p => {
                    let grown = o.base_p.is_prefix_of(&s.base_p) && o.base_q.is_prefix_of(&s.base_q);
                    let aligned = s.ordered() || s.base_p.len() - o.base_p.len() == s.base_q.len() - o.base_q.len();
                    if o.q != s.q || o.mode != s.mode || !grown || !aligned {
                        return (Ok(()), fail("(h)", format!("singular cell at {} changed between stages", s.p)));
                    }
                }
                _ => {
                    let Some(p) = prev_piece(&prev.map, &s.base_p) else {
                        return (fail("(f)", format!("new region [{}] straddles stage-{} pieces", s.base_p, prev.n)), Ok(()));
                    };
                    let d = piece_depth(p.source.len(), p.target.len(), prev.depth);
                    if s.base_p.len() < d {
                        return (fail("(f)", format!("new region [{}] is coarser than its stage-{} piece", s.base_p, prev.n)), Ok(()));
                    }
                    if !p.image_word(&s.base_p.prefix(d)).is_prefix_of(&s.base_q) {
                        return (Ok(()), fail("(h)", format!("[{}] ↦ [{}] leaves its stage-{} image", s.base_p, s.base_q, prev.n)));
                    }
                }
            },
        }
    }
    (Ok(()), Ok(()))
}

/// Condition (i) data for one point `x` of the monotonicity set: `x` entered
/// `G^0` at `stage`, and `[a, b]` is the cone it was isolated in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotonicityWitness {
    pub x: EpPoint,
    pub stage: usize,
    pub image: EpPoint,
    pub a: EpPoint,
    pub b: EpPoint,
}

/// Witnesses `(a, b)` for every absorbed point of `w`, in order of absorption.
pub fn monotonicity_witnesses(run: &EngineRun, w: &SetPresentation) -> Vec<MonotonicityWitness> {
    witnesses(&run.stages, w)
}

fn witnesses(stages: &[EngineState], w: &SetPresentation) -> Vec<MonotonicityWitness> {
    let mut out: Vec<MonotonicityWitness> = Vec::new();
    for s in stages {
        for sg in s.map.singulars() {
            if w.contains(&sg.p) && !out.iter().any(|m| m.x == sg.p) {
                out.push(MonotonicityWitness {
                    x: sg.p.clone(),
                    stage: s.n,
                    image: sg.q.clone(),
                    a: EpPoint::constant_tail(&sg.base_p, 0),
                    b: EpPoint::constant_tail(&sg.base_p, 1),
                });
            }
        }
    }
    out.sort_by(|m, n| (m.stage, &m.x).cmp(&(n.stage, &n.x)));
    out
}

/// Every cell inside `[a, b]` other than the one centered at `x` lies on one
/// side of `x` and is carried to the same side of `h_k(x)`.
fn check_i(stages: &[EngineState], w: &SetPresentation) -> Result<Vec<MonotonicityWitness>, Failure> {
    let wit = witnesses(stages, w);
    for m in &wit {
        let base = m.a.prefix(m.a.divergence(&m.b).unwrap_or(0));
        for s in &stages[m.stage..] {
            match s.map.cell_for(&m.x) {
                Some(Cell::Singular(o)) if o.p == m.x && o.q == m.image && o.ordered() => {}
                _ => return Err(Failure::new("(i)", format!("stage {}: {} is no longer an ordered center", s.n, m.x))),
            }
            for c in s.map.cells() {
                if !base.is_prefix_of(c.source()) || c.source() == &base {
                    continue;
                }
                let left = EpPoint::constant_tail(c.source(), 0) < m.x;
                let image_left = EpPoint::constant_tail(c.target(), 0) < m.image;
                if left != image_left {
                    return Err(Failure::new(
                        "(i)",
                        format!("stage {}: [{}] ↦ [{}] crosses h({}) = {}", s.n, c.source(), c.target(), m.x, m.image),
                    ));
                }
            }
        }
    }
    Ok(wit)
}

const TAILS: [&str; 4] = ["(01)", "(0011)", "1(0)", "0(1)"];

fn tail(i: usize) -> EpPoint {
    EpPoint::parse_normalized(TAILS[i % TAILS.len()]).expect("fixed tails parse")
}

fn check_g(s: &EngineState, samples: usize, mode: Mode) -> Check {
    for (i, p) in sample_pieces(&s.map).into_iter().enumerate().take(samples.max(1) * 8) {
        let d = piece_depth(p.source.len(), p.target.len(), s.depth);
        let piece = s.map.cell_for(&tail(0).prepend(&p.source)).map(|_| ());
        if piece.is_none() {
            return fail("(g)", format!("[{}] has no cell", p.source));
        }
        let mut pts: Vec<EpPoint> = (0..4).map(|j| tail(i + j).prepend(&EpPoint::constant_tail(&p.source, 0).prefix(d))).collect();
        pts.sort();
        let mut prev: Option<EpPoint> = None;
        for x in &pts {
            let y = s.map.apply(x).map_err(|e| Failure::new("(g)", e.to_string()))?;
            if !y.in_cone(&p.image_word(&x.prefix(d))) || !y.tail_equiv(x) {
                return fail("(g)", format!("h_{}({x}) = {y} leaves α([{}])", s.n, x.prefix(d)));
            }
            if mode == Mode::Ordered {
                if let Some(py) = &prev {
                    if *py >= y {
                        return fail("(g)", format!("h_{} is not order-preserving on [{}]", s.n, x.prefix(d)));
                    }
                }
                prev = Some(y);
            }
        }
    }
    Ok(())
}

fn check_cover(s: &EngineState) -> Check {
    let cert = validate(&s.map, 8);
    match cert.first_failure() {
        None => Ok(()),
        Some(f) => fail("cover", format!("stage {}: {} ({})", s.n, f.clause, f.witness.clone().unwrap_or_default())),
    }
}

fn check_tails(s: &EngineState, samples: usize) -> Check {
    let g0: BTreeSet<&EpPoint> = s.g0.iter().collect();
    for x in SetPresentation::all().enumerate(samples) {
        if g0.contains(&x) {
            continue;
        }
        let y = s.map.apply(&x).map_err(|e| Failure::new("tail-preservation", e.to_string()))?;
        if !y.tail_equiv(&x) {
            return fail("tail-preservation", format!("h_{}({x}) = {y}", s.n));
        }
    }
    Ok(())
}

/// Enumerated points of each transported set that were absorbed land in the
/// target set, and absorbed target points come from the source set.
fn check_transport<P: StagePolicy + ?Sized>(s: &EngineState, policy: &P, samples: usize) -> Check {
    for t in policy.transported_sets() {
        for x in t.source.enumerate(samples).iter().filter(|x| s.in_g0(x)) {
            let y = s.map.apply(x).map_err(|e| Failure::new("dense-transport", e.to_string()))?;
            if !t.target.contains(&y) {
                return fail("dense-transport", format!("{x} ∈ {n} ↦ {y} ∉ {n}'", n = t.name));
            }
        }
        for y in t.target.enumerate(samples).iter().filter(|y| s.in_g1(y)) {
            let x = s.map.apply_inverse(y).map_err(|e| Failure::new("dense-transport", e.to_string()))?;
            if !t.source.contains(&x) {
                return fail("dense-transport", format!("{y} has preimage {x} outside {}", t.name));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conemap::SingularAssignment;
    use crate::engine::tests::standard;
    use crate::engine::synthesize;

    #[test]
    fn fresh_run_passes() {
        let (policy, run) = synthesize(&standard(), 8).unwrap();
        let cert = certify(&run, &policy, 20);
        assert!(cert.passed(), "{:#?}", cert.failures().collect::<Vec<_>>());
    }

    #[test]
    fn stage_zero_is_vacuous() {
        let (policy, run) = synthesize(&standard(), 0).unwrap();
        assert!(certify(&run, &policy, 10).passed());
    }

    #[test]
    fn target_moved_out_of_e_fails_c() {
        let (policy, mut run) = synthesize(&standard(), 4).unwrap();
        let last = run.stages.last_mut().unwrap();
        let s: SingularAssignment = last.map.singulars().find(|s| policy.e.contains(&s.p)).unwrap().clone();
        let bad_q = EpPoint::parse_normalized("(0001)").unwrap().prepend(&s.base_q);
        let mut cells: Vec<Cell> = last.map.cells().filter(|c| c.source() != &s.base_p).cloned().collect();
        cells.push(Cell::Singular(SingularAssignment { q: bad_q.clone(), ..s.clone() }));
        last.map = PiecewiseConeHomeo::from_cells(cells).unwrap();
        last.g1 = last.map.singulars().map(|s| s.q.clone()).collect();
        last.g1.sort();
        let cert = certify(&run, &policy, 10);
        assert!(!cert.verdict("(c)").unwrap().passed);
    }
}
