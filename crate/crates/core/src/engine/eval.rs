use serde::{Deserialize, Serialize};

use super::{piece_at, EngineRun, StagePolicy};
use crate::error::{Error, Result};
use crate::point::EpPoint;
use crate::word::Word;

/// Value of the limit map at a point, to a given resolution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Evaluation {
    /// The point was absorbed; this is its final image.
    Exact(EpPoint),
    /// The image lies in this cone.
    Cone(Word),
}

impl Evaluation {
    /// Whether `y` is consistent with this answer.
    pub fn admits(&self, y: &EpPoint) -> bool {
        match self {
            Evaluation::Exact(p) => p == y,
            Evaluation::Cone(w) => y.in_cone(w),
        }
    }

    /// The cone of length `k` holding the answer.
    pub fn cone(&self, k: usize) -> Word {
        match self {
            Evaluation::Exact(p) => p.prefix(k),
            Evaluation::Cone(w) => w.prefix(k.min(w.len())),
        }
    }
}

/// The limit homeomorphism, realized by driving stages on demand.
#[derive(Debug)]
pub struct EvaluableHomeo<P: StagePolicy> {
    pub policy: P,
    pub run: EngineRun,
}

impl<P: StagePolicy> EvaluableHomeo<P> {
    pub fn new(policy: P) -> Self {
        EvaluableHomeo { policy, run: EngineRun::new() }
    }

    pub fn with_run(policy: P, run: EngineRun) -> Self {
        EvaluableHomeo { policy, run }
    }

    /// Least stage whose cover pieces have words of length at least `k`.
    pub fn stage_for(k: usize) -> usize {
        match k {
            0 => 0,
            1 => 1,
            _ => k - 1,
        }
    }

    pub fn evaluate(&mut self, x: &EpPoint, k: usize) -> Result<Evaluation> {
        let state = self.run.drive_to(Self::stage_for(k), &self.policy)?;
        if state.in_g0(x) {
            return Ok(Evaluation::Exact(state.map.apply(x)?));
        }
        let piece = state
            .piece_of(x)
            .ok_or_else(|| Error::InvalidMap(format!("no cover piece holds {x}")))?;
        Ok(Evaluation::Cone(piece.target))
    }

    pub fn evaluate_inverse(&mut self, y: &EpPoint, k: usize) -> Result<Evaluation> {
        let state = self.run.drive_to(Self::stage_for(k), &self.policy)?;
        if state.in_g1(y) {
            return Ok(Evaluation::Exact(state.map.apply_inverse(y)?));
        }
        let inv = state.map.inverse();
        let piece = piece_at(&inv, y, state.depth)
            .ok_or_else(|| Error::InvalidMap(format!("no cover piece holds {y}")))?;
        Ok(Evaluation::Cone(piece.target))
    }
}
