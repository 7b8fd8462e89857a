//! Stage-by-stage synthesis of a homeomorphism of `2^ω` carrying one countable
//! dense set onto another while fixing a saturated set.

mod certify;
mod eval;

use std::cell::RefCell;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::conemap::{Cell, ConePiece, Mode, PiecewiseConeHomeo, SingularAssignment};
use crate::error::{Error, Result};
use crate::point::EpPoint;
use crate::radial::PieceIndex;
use crate::tailclass::{SetPresentation, TailClass};
use crate::word::Word;

pub use certify::{certify, certify_stage_pair, monotonicity_witnesses, MonotonicityWitness, TransportedSet};
pub use eval::{EvaluableHomeo, Evaluation};

/// Input of the plain construction: `X` saturated, `D0`, `D1` dense in `X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemInstance {
    #[serde(rename = "X")]
    pub x: SetPresentation,
    #[serde(rename = "D0")]
    pub d0: SetPresentation,
    #[serde(rename = "D1")]
    pub d1: SetPresentation,
}

/// Classes of a dense presentation; explicit point lists are not dense.
pub(crate) fn class_list(name: &str, s: &SetPresentation) -> Result<Vec<TailClass>> {
    match s {
        SetPresentation::Classes { classes } if !classes.is_empty() => Ok(classes.clone()),
        _ => Err(Error::InstanceRejected(format!("{name} must be a nonempty list of tail classes"))),
    }
}

/// `E_i = D_i ∪ (a fresh class of X)`, the fresh classes being the first two
/// classes of `X` in canonical order outside `D0 ∪ D1`.
pub fn choose_envelopes(
    x: &SetPresentation,
    d0: &SetPresentation,
    d1: &SetPresentation,
) -> Result<(SetPresentation, SetPresentation)> {
    let f = fresh_classes(x, d0, d1)?;
    Ok((
        SetPresentation::classes(class_list("D0", d0)?.into_iter().chain([f[0].clone()])),
        SetPresentation::classes(class_list("D1", d1)?.into_iter().chain([f[1].clone()])),
    ))
}

fn fresh_classes(x: &SetPresentation, d0: &SetPresentation, d1: &SetPresentation) -> Result<[TailClass; 2]> {
    if !x.is_saturated() {
        return Err(Error::InstanceRejected("X must be saturated".into()));
    }
    let (c0, c1) = (class_list("D0", d0)?, class_list("D1", d1)?);
    if let Some(c) = c0.iter().chain(&c1).find(|c| !x.contains_class(c)) {
        return Err(Error::InstanceRejected(format!("class {c} of D lies outside X")));
    }
    let taken: BTreeSet<&TailClass> = c0.iter().chain(&c1).collect();
    let mut fresh = x.class_iter().filter(|c| !taken.contains(c));
    match (fresh.next(), fresh.next()) {
        (Some(a), Some(b)) => Ok([a, b]),
        _ => Err(Error::InstanceRejected("X has too few tail classes to supply fresh envelopes".into())),
    }
}

/// `K_n`: the first `n+1` points of an enumeration of `X∖A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GdeltaWitness {
    pub complement: SetPresentation,
}

pub fn gdelta_witness(x: &SetPresentation, a: &SetPresentation) -> Result<GdeltaWitness> {
    Ok(GdeltaWitness { complement: x.difference(a)? })
}

impl GdeltaWitness {
    pub fn k(&self, n: usize) -> Vec<EpPoint> {
        self.complement.enumerate(n + 1)
    }
}

/// What varies between the plain, ordered and arrow constructions.
pub trait StagePolicy {
    fn mode(&self) -> Mode;
    /// Point absorbed into `G^0` at stage `n`.
    fn forward_point(&self, n: usize) -> EpPoint;
    /// Point absorbed into `G^1` at stage `n`.
    fn backward_point(&self, n: usize) -> EpPoint;
    /// `K_n`.
    fn witness_points(&self, n: usize) -> Vec<EpPoint>;
    /// Classes an image of a forward point may be drawn from.
    fn forward_pool(&self, d: &EpPoint) -> Vec<TailClass>;
    /// Classes a preimage of a backward point may be drawn from.
    fn backward_pool(&self, y: &EpPoint) -> Vec<TailClass>;
    /// Pairs `(S, T)` with `h_n[S∩G^0] = T∩G^1` required at every stage.
    fn transported_sets(&self) -> Vec<TransportedSet>;
    /// Set at whose points the limit must be monotone; ordered runs only.
    fn monotone_set(&self) -> Option<SetPresentation> {
        None
    }
}

/// Memoized enumeration of a presented set.
#[derive(Debug)]
pub(crate) struct EnumCache {
    set: SetPresentation,
    points: RefCell<Vec<EpPoint>>,
}

impl EnumCache {
    pub(crate) fn new(set: SetPresentation) -> Self {
        EnumCache { set, points: RefCell::new(Vec::new()) }
    }

    pub(crate) fn prefix(&self, n: usize) -> Vec<EpPoint> {
        let mut pts = self.points.borrow_mut();
        if pts.len() < n {
            *pts = self.set.enumerate(n.max(2 * pts.len()));
        }
        pts[..n.min(pts.len())].to_vec()
    }

    pub(crate) fn nth(&self, n: usize) -> EpPoint {
        self.prefix(n + 1).pop().expect("presented sets are infinite")
    }
}

/// Policy of the plain construction: `d_n` enumerates `E = E0 ∪ E1` on both
/// sides and `K_n` enumerates `Y = X∖E`.
#[derive(Debug)]
pub struct PlainPolicy {
    pub instance: ProblemInstance,
    pub e0: SetPresentation,
    pub e1: SetPresentation,
    pub e: SetPresentation,
    pub y: SetPresentation,
    fresh: [TailClass; 2],
    e_enum: EnumCache,
    y_enum: EnumCache,
}

impl PlainPolicy {
    pub fn new(instance: ProblemInstance) -> Result<Self> {
        let fresh = fresh_classes(&instance.x, &instance.d0, &instance.d1)?;
        let (e0, e1) = choose_envelopes(&instance.x, &instance.d0, &instance.d1)?;
        let e = e0.union(&e1)?;
        let y = instance.x.difference(&e)?;
        if matches!(&y, SetPresentation::Classes { classes } if classes.is_empty()) {
            return Err(Error::InstanceRejected("X∖E is empty; nothing to witness".into()));
        }
        Ok(PlainPolicy {
            e_enum: EnumCache::new(e.clone()),
            y_enum: EnumCache::new(y.clone()),
            instance,
            e0,
            e1,
            e,
            y,
            fresh,
        })
    }

    pub fn fresh_classes(&self) -> &[TailClass; 2] {
        &self.fresh
    }

    /// `d_n`, the `n`-th point of `E`.
    pub fn d(&self, n: usize) -> EpPoint {
        self.e_enum.nth(n)
    }
}

impl StagePolicy for PlainPolicy {
    fn mode(&self) -> Mode {
        Mode::Unordered
    }

    fn forward_point(&self, n: usize) -> EpPoint {
        self.d(n)
    }

    fn backward_point(&self, n: usize) -> EpPoint {
        self.d(n)
    }

    fn witness_points(&self, n: usize) -> Vec<EpPoint> {
        self.y_enum.prefix(n + 1)
    }

    fn forward_pool(&self, d: &EpPoint) -> Vec<TailClass> {
        if self.instance.d0.contains(d) {
            class_list("D1", &self.instance.d1).unwrap_or_default()
        } else {
            vec![self.fresh[1].clone()]
        }
    }

    fn backward_pool(&self, y: &EpPoint) -> Vec<TailClass> {
        if self.instance.d1.contains(y) {
            class_list("D0", &self.instance.d0).unwrap_or_default()
        } else {
            vec![self.fresh[0].clone()]
        }
    }

    fn transported_sets(&self) -> Vec<TransportedSet> {
        vec![
            TransportedSet::new("D", self.instance.d0.clone(), self.instance.d1.clone()),
            TransportedSet::new("E", self.e.clone(), self.e.clone()),
            TransportedSet::new("Y", self.y.clone(), self.y.clone()),
            TransportedSet::new("X", self.instance.x.clone(), self.instance.x.clone()),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Half {
    Forward,
    Backward,
}

/// Record of one absorption decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageEvent {
    pub half: Half,
    pub kind: EventKind,
    /// The absorbed point on the side being processed.
    pub point: EpPoint,
    /// Its partner on the other side, when one was created.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<EpPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    /// A dense-sequence point received a chosen partner.
    Dense,
    /// A witness point was pinned at its current image.
    Witness,
    /// The point was already absorbed; nothing to do.
    AlreadyAbsorbed,
}

/// One stage: the map `h_n`, its anchor sets, and the cover depth.
///
/// The cover `⟨I^0_n, I^1_n, α_n⟩` is implicit: every translation cell and every
/// radial piece of a singular cell is cut into subcones whose source and target
/// words both have length at least `depth`, and `α_n` is the cell's translation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineState {
    pub n: usize,
    pub depth: usize,
    pub map: PiecewiseConeHomeo,
    #[serde(rename = "G0")]
    pub g0: Vec<EpPoint>,
    #[serde(rename = "G1")]
    pub g1: Vec<EpPoint>,
    #[serde(default)]
    pub events: Vec<StageEvent>,
}

/// Length of the subcones a cell piece `[s] → [t]` is cut into at cover depth `l`.
pub fn piece_depth(source_len: usize, target_len: usize, l: usize) -> usize {
    let lifted = l as i64 + source_len as i64 - target_len as i64;
    source_len.max(l).max(lifted.max(0) as usize)
}

/// Cover depth at stage `n`: words of length `n+1` from stage 1 on; stage 0
/// keeps the single piece `2^ω`.
pub fn cover_depth(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        n + 1
    }
}

impl EngineState {
    pub fn initial() -> Self {
        EngineState {
            n: 0,
            depth: 0,
            map: PiecewiseConeHomeo::identity(),
            g0: Vec::new(),
            g1: Vec::new(),
            events: Vec::new(),
        }
    }

    fn from_map(n: usize, map: PiecewiseConeHomeo, events: Vec<StageEvent>) -> Self {
        let mut g0: Vec<EpPoint> = map.singulars().map(|s| s.p.clone()).collect();
        let mut g1: Vec<EpPoint> = map.singulars().map(|s| s.q.clone()).collect();
        g0.sort();
        g1.sort();
        EngineState { n, depth: cover_depth(n), map, g0, g1, events }
    }

    pub fn in_g0(&self, x: &EpPoint) -> bool {
        self.g0.binary_search(x).is_ok()
    }

    pub fn in_g1(&self, y: &EpPoint) -> bool {
        self.g1.binary_search(y).is_ok()
    }

    /// Cover piece of `I^0_n` holding `x ∉ G^0`, with its `α_n`-image.
    pub fn piece_of(&self, x: &EpPoint) -> Option<ConePiece> {
        piece_at(&self.map, x, self.depth)
    }

    /// Cover piece of `I^1_n` holding `y ∉ G^1`, with its `α_n`-preimage, as a
    /// pair `(target, source)`.
    pub fn target_piece_of(&self, y: &EpPoint) -> Option<ConePiece> {
        piece_at(&self.map.inverse(), y, self.depth)
    }
}

/// The cell translation acting on `x`, as a cone pair.
pub(crate) fn carrying_piece(map: &PiecewiseConeHomeo, x: &EpPoint) -> Option<ConePiece> {
    match map.cell_for(x)? {
        Cell::Piece(c) => Some(c.clone()),
        Cell::Singular(s) => {
            let idx = s.source_scheme().locate(x)?;
            if !s.owns(idx) {
                return None;
            }
            s.piece_pair(idx)
        }
    }
}

pub(crate) fn piece_at(map: &PiecewiseConeHomeo, x: &EpPoint, depth: usize) -> Option<ConePiece> {
    let c = carrying_piece(map, x)?;
    let d = piece_depth(c.source.len(), c.target.len(), depth);
    let s = x.prefix(d);
    Some(ConePiece::new(s.clone(), c.image_word(&s)))
}

enum Image<'a> {
    /// Keep the current image.
    Current,
    /// Choose a partner from these classes.
    Choose(&'a [TailClass]),
}

/// Make `x` lie in a translation cell cut to cover depth, and return that cell.
fn isolate(map: &mut PiecewiseConeHomeo, x: &EpPoint, depth: usize) -> Result<ConePiece> {
    loop {
        let cell = map.cell_for(x).cloned().ok_or_else(|| Error::InvalidMap(format!("no cell holds {x}")))?;
        match cell {
            Cell::Piece(c) => {
                let d = piece_depth(c.source.len(), c.target.len(), depth);
                map.remove(&c.source);
                for j in c.source.len()..d {
                    let mut sib = x.prefix(j);
                    sib.push(1 - x.digit(j));
                    map.insert(Cell::Piece(ConePiece::new(sib.clone(), c.image_word(&sib))));
                }
                let s = x.prefix(d);
                let piece = ConePiece::new(s.clone(), c.image_word(&s));
                map.insert(Cell::Piece(piece.clone()));
                return Ok(piece);
            }
            Cell::Singular(s) if s.p == *x => {
                return Err(Error::Domain(format!("{x} is already a singular point")));
            }
            Cell::Singular(mut s) => {
                let idx = s
                    .source_scheme()
                    .locate(x)
                    .ok_or_else(|| Error::InvalidMap(format!("{x} is not in the radial region at {}", s.p)))?;
                map.remove(&s.base_p);
                match idx {
                    PieceIndex::Depth(_) => {
                        // peel off the outermost piece until x leaves the radial region
                        let first = s.piece_pair(PieceIndex::Depth(0)).expect("depth pieces exist");
                        map.insert(Cell::Piece(first));
                        s.base_p = s.p.prefix(s.base_p.len() + 1);
                        s.base_q = s.q.prefix(s.base_q.len() + 1);
                    }
                    PieceIndex::Sided(side, k) => {
                        for j in s.skip[side.index()]..=k {
                            let pair = s.piece_pair(PieceIndex::Sided(side, j)).expect("ordered pieces exist");
                            map.insert(Cell::Piece(pair));
                        }
                        s.skip[side.index()] = k + 1;
                    }
                }
                map.insert(Cell::Singular(s));
            }
        }
    }
}

/// First member of `pool` inside `[t]` not already used, trying classes round-robin.
fn choose_in_cone(t: &Word, pool: &[TailClass], taken: &BTreeSet<EpPoint>, ordered: bool) -> Result<EpPoint> {
    if pool.is_empty() {
        return Err(Error::InstanceRejected("no class available for a partner point".into()));
    }
    let mut streams: Vec<_> = pool.iter().map(|c| c.members()).collect();
    for _ in 0..10_000 {
        for s in streams.iter_mut() {
            let z = s.next().expect("classes are infinite");
            let e = z.prepend(t);
            if !taken.contains(&e) && !(ordered && e.in_q()) {
                return Ok(e);
            }
        }
    }
    Err(Error::InstanceRejected(format!("no admissible partner found in [{t}]")))
}

/// Add `x` as a singular point of `map`, and return its image.
fn absorb(map: &mut PiecewiseConeHomeo, x: &EpPoint, depth: usize, mode: Mode, image: Image) -> Result<EpPoint> {
    if mode == Mode::Ordered && x.in_q() {
        return Err(Error::InstanceRejected(format!(
            "{x} has an immediate neighbour; ordered stages need points outside Q"
        )));
    }
    let taken: BTreeSet<EpPoint> = map.singulars().map(|s| s.q.clone()).collect();
    let piece = isolate(map, x, depth)?;
    let y = match image {
        Image::Current => piece.apply(x),
        Image::Choose(pool) => choose_in_cone(&piece.target, pool, &taken, mode == Mode::Ordered)?,
    };
    map.remove(&piece.source);
    map.insert(Cell::Singular(SingularAssignment::new(piece.source, x.clone(), piece.target, y.clone(), mode)));
    Ok(y)
}

fn is_center(map: &PiecewiseConeHomeo, x: &EpPoint) -> bool {
    matches!(map.cell_for(x), Some(Cell::Singular(s)) if s.p == *x)
}

/// One half-stage on `map`: absorb `d` with a chosen partner, then `ks` at their
/// current images.
#[allow(clippy::too_many_arguments)]
fn half_stage(
    map: &mut PiecewiseConeHomeo,
    half: Half,
    d: &EpPoint,
    pool: &[TailClass],
    ks: &[EpPoint],
    depth: usize,
    mode: Mode,
    events: &mut Vec<StageEvent>,
) -> Result<()> {
    if is_center(map, d) {
        events.push(StageEvent { half, kind: EventKind::AlreadyAbsorbed, point: d.clone(), partner: None });
    } else {
        let e = absorb(map, d, depth, mode, Image::Choose(pool))?;
        events.push(StageEvent { half, kind: EventKind::Dense, point: d.clone(), partner: Some(e) });
    }
    for k in ks {
        if !is_center(map, k) {
            let y = absorb(map, k, depth, mode, Image::Current)?;
            events.push(StageEvent { half, kind: EventKind::Witness, point: k.clone(), partner: Some(y) });
        }
    }
    Ok(())
}

/// Stage `n → n+1`.
pub fn run_stage<P: StagePolicy + ?Sized>(state: &EngineState, policy: &P) -> Result<EngineState> {
    let n = state.n;
    let mode = policy.mode();
    let ks = policy.witness_points(n);
    let mut events = Vec::new();

    let mut map = state.map.clone();
    let d = policy.forward_point(n);
    let pool = policy.forward_pool(&d);
    half_stage(&mut map, Half::Forward, &d, &pool, &ks, state.depth, mode, &mut events)?;

    let mut inv = map.inverse();
    let d1 = policy.backward_point(n);
    let pool = policy.backward_pool(&d1);
    half_stage(&mut inv, Half::Backward, &d1, &pool, &ks, state.depth, mode, &mut events)?;

    Ok(EngineState::from_map(n + 1, inv.inverse(), events))
}

/// All stages `0..=n` of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineRun {
    pub stages: Vec<EngineState>,
}

impl Default for EngineRun {
    fn default() -> Self {
        Self::new()
    }
}

impl EngineRun {
    pub fn new() -> Self {
        EngineRun { stages: vec![EngineState::initial()] }
    }

    pub fn current(&self) -> &EngineState {
        self.stages.last().expect("a run always has stage 0")
    }

    pub fn stage(&self, n: usize) -> Option<&EngineState> {
        self.stages.get(n)
    }

    pub fn advance<P: StagePolicy + ?Sized>(&mut self, policy: &P) -> Result<&EngineState> {
        let next = run_stage(self.current(), policy)?;
        self.stages.push(next);
        Ok(self.current())
    }

    pub fn drive_to<P: StagePolicy + ?Sized>(&mut self, n: usize, policy: &P) -> Result<&EngineState> {
        while self.current().n < n {
            self.advance(policy)?;
        }
        Ok(&self.stages[n])
    }
}

/// Run the plain construction for `stages` stages.
pub fn synthesize(instance: &ProblemInstance, stages: usize) -> Result<(PlainPolicy, EngineRun)> {
    let policy = PlainPolicy::new(instance.clone())?;
    let mut run = EngineRun::new();
    run.drive_to(stages, &policy)?;
    Ok((policy, run))
}
