//! Exchanging two countable dense subsets `D`, `E` of `𝔸(Y)`.
//!
//! The bases of `D ∪ E` saturate to `F`, and `Z = Y∖F` is left over. An
//! ordered run on `2^ω` carries the bases of `D` onto those of `E`, keeps `Z`
//! and is monotone on it; lifting it through `𝔸(F)` to `𝔸(Y)` gives `H`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ordered::{OrderedInstance, OrderedPolicy};
use super::{arrow_project, lift, ArrowMap, ArrowPoint, ArrowPresentation};
use crate::certificate::{Certificate, Failure};
use crate::conemap::{star_order_iso, ClosedInterval};
use crate::engine::{certify, EngineRun, EngineState, EvaluableHomeo};
use crate::error::{Error, Result};
use crate::point::EpPoint;
use crate::tailclass::{SetPresentation, TailClass};
use crate::word::Word;

/// `C × sides` for a tail class `C`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidedClass {
    pub class: TailClass,
    pub sides: Vec<u8>,
}

impl SidedClass {
    /// Bit pattern of the sides, used to pair classes of `D` with classes of `E`.
    fn pattern(&self) -> u8 {
        self.sides.iter().fold(0, |acc, s| acc | (1 << s))
    }
}

/// A countable subset of `𝔸(Y)` given as sided classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArrowSet {
    pub classes: Vec<SidedClass>,
}

impl ArrowSet {
    pub fn new(classes: impl IntoIterator<Item = (TailClass, Vec<u8>)>) -> Self {
        let mut classes: Vec<SidedClass> = classes
            .into_iter()
            .map(|(class, mut sides)| {
                sides.sort();
                sides.dedup();
                SidedClass { class, sides }
            })
            .collect();
        classes.sort_by(|a, b| a.class.cmp(&b.class));
        ArrowSet { classes }
    }

    pub fn bases(&self) -> SetPresentation {
        SetPresentation::classes(self.classes.iter().map(|c| c.class.clone()))
    }

    fn entry(&self, x: &EpPoint) -> Option<&SidedClass> {
        self.classes.iter().find(|c| c.class.contains(x))
    }

    pub fn contains(&self, p: &ArrowPoint) -> bool {
        self.entry(&p.base).is_some_and(|c| c.sides.contains(&p.side))
    }

    /// The points over the first `n` enumerated bases.
    pub fn enumerate(&self, n: usize) -> Vec<ArrowPoint> {
        let mut out = Vec::new();
        for x in self.bases().enumerate(n) {
            let c = self.entry(&x).expect("enumerated from these classes");
            out.extend(c.sides.iter().map(|&s| ArrowPoint::new(x.clone(), s)));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowInstance {
    #[serde(rename = "Y")]
    pub y: SetPresentation,
    #[serde(rename = "D")]
    pub d: ArrowSet,
    #[serde(rename = "E")]
    pub e: ArrowSet,
}

/// The derived sets of an arrow instance and the ordered problem they pose.
#[derive(Debug)]
pub struct ArrowPipeline {
    pub instance: ArrowInstance,
    pub y: ArrowPresentation,
    /// `F = G*`, where `G` holds the bases of `D ∪ E`.
    pub f: ArrowPresentation,
    /// `Z = Y∖F`, the monotonicity set of the ordered run.
    pub z: SetPresentation,
    pub policy: OrderedPolicy,
}

fn rejected(e: Error) -> Error {
    match e {
        Error::Domain(m) | Error::Unsupported(m) => Error::InstanceRejected(m),
        other => other,
    }
}

impl ArrowPipeline {
    pub fn new(instance: ArrowInstance) -> Result<Self> {
        if !instance.y.is_saturated() {
            return Err(Error::InstanceRejected("Y must be saturated".into()));
        }
        let y = ArrowPresentation::new(instance.y.clone()).map_err(rejected)?;
        for (name, set) in [("D", &instance.d), ("E", &instance.e)] {
            if set.classes.is_empty() {
                return Err(Error::InstanceRejected(format!("{name} is empty")));
            }
            for c in &set.classes {
                if c.sides.is_empty() || c.sides.iter().any(|&s| s > 1) {
                    return Err(Error::InstanceRejected(format!("{name}: bad sides for class {}", c.class)));
                }
                if !instance.y.contains_class(&c.class) {
                    return Err(Error::InstanceRejected(format!("{name}: class {} is not in Y", c.class)));
                }
            }
        }
        let g = instance.d.bases().union(&instance.e.bases())?;
        let f = ArrowPresentation::new(g.clone()).map_err(rejected)?;
        let z = instance.y.difference(&g)?;
        let colors: BTreeMap<TailClass, u8> = instance
            .d
            .classes
            .iter()
            .chain(&instance.e.classes)
            .map(|c| (c.class.clone(), c.pattern()))
            .collect();
        let clash = instance.d.classes.iter().chain(&instance.e.classes).find(|c| colors[&c.class] != c.pattern());
        if let Some(c) = clash {
            return Err(Error::InstanceRejected(format!("class {} has different sides in D and E", c.class)));
        }
        let ordered = OrderedInstance { d0: instance.d.bases(), d1: instance.e.bases(), w: z.clone() };
        let policy = OrderedPolicy::colored(ordered, colors)?;
        Ok(ArrowPipeline { instance, y, f, z, policy })
    }

    /// `h_n` on `𝔸(∅) = 2^ω`, `𝔸(F)` and `𝔸(Y)`.
    pub fn lifts(&self, stage: &EngineState) -> Result<[ArrowMap; 3]> {
        let h = ArrowMap::on_cantor(stage.map.clone());
        let hf = lift(&h, &self.f)?;
        let hy = lift(&hf, &self.y)?;
        Ok([h, hf, hy])
    }
}

/// Build the pipeline and run `stages` ordered stages.
pub fn arrow_cdh_synthesize(instance: &ArrowInstance, stages: usize) -> Result<LiftedHomeo> {
    let pipeline = ArrowPipeline::new(instance.clone())?;
    let mut run = EngineRun::new();
    run.drive_to(stages, &pipeline.policy)?;
    Ok(LiftedHomeo { pipeline, run })
}

/// Value of `H` at a point of `𝔸(Y)` to a given resolution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrowEvaluation {
    Exact(ArrowPoint),
    /// The base of the image lies in this cone.
    Cone(Word),
}

/// The lifted limit map `H` on `𝔸(Y)`.
#[derive(Debug)]
pub struct LiftedHomeo {
    pub pipeline: ArrowPipeline,
    pub run: EngineRun,
}

impl LiftedHomeo {
    pub fn current(&self) -> Result<ArrowMap> {
        let [_, _, hy] = self.pipeline.lifts(self.run.current())?;
        Ok(hy)
    }

    pub fn evaluate(&mut self, p: &ArrowPoint, k: usize) -> Result<ArrowEvaluation> {
        self.pipeline.y.check(p)?;
        let n = EvaluableHomeo::<OrderedPolicy>::stage_for(k);
        self.run.drive_to(n, &self.pipeline.policy)?;
        let stage = &self.run.stages[n];
        if stage.in_g0(&p.base) {
            let [_, _, hy] = self.pipeline.lifts(stage)?;
            return Ok(ArrowEvaluation::Exact(hy.apply(p)?));
        }
        let piece = stage.piece_of(&p.base).ok_or_else(|| Error::InvalidMap(format!("no cover piece holds {}", p.base)))?;
        Ok(ArrowEvaluation::Cone(piece.target))
    }
}

fn check(clause: &str, ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::new(clause, msg()))
    }
}

/// The ordered stage conditions, the hypotheses of the pipeline, and the
/// lifted map's transport and commuting identities on `samples`.
pub fn certify_arrow(h: &LiftedHomeo, samples: &[ArrowPoint]) -> Certificate {
    let p = &h.pipeline;
    let mut cert = Certificate::new();
    cert.absorb("", certify(&h.run, &p.policy, 16));
    cert.record("W-disjoint", check_w_disjoint(p));
    cert.record("(∗)", check_star(&p.z));
    match p.lifts(h.run.current()) {
        Err(e) => {
            cert.record("lift", Err(Failure::new("lift", e.to_string())));
        }
        Ok([h0, hf, hy]) => {
            cert.record("lift", Ok(()));
            cert.record("arrow-transport", check_arrow_transport(h, &hy));
            cert.record("commuting", check_commuting(p, &h0, &hf, &hy, samples));
            cert.record("order", check_order(&hy, samples));
        }
    }
    cert
}

/// `W = Z` avoids `Q` and the bases of `D` and `E`.
fn check_w_disjoint(p: &ArrowPipeline) -> std::result::Result<(), Failure> {
    let g = p.instance.d.bases().union(&p.instance.e.bases()).map_err(|e| Failure::new("W-disjoint", e.to_string()))?;
    for c in p.z.class_iter() {
        check("W-disjoint", !c.is_q(), || format!("W contains the class {c} of Q"))?;
        check("W-disjoint", !g.contains_class(&c), || format!("W meets D′ ∪ E′ in class {c}"))?;
    }
    Ok(())
}

/// Condition (∗) on all pairs of cones of length ≤ 2, checked on enumerated
/// points of `W`.
fn check_star(w: &SetPresentation) -> std::result::Result<(), Failure> {
    let words: Vec<Word> = (0..=2).flat_map(Word::all_of_length).collect();
    let mut pts = w.enumerate(48);
    pts.sort();
    for s in &words {
        for t in &words {
            let (i, j) = (ClosedInterval::cone(s), ClosedInterval::cone(t));
            let f = star_order_iso(&i, &j, w, 6).map_err(|e| Failure::new("(∗)", e.to_string()))?;
            let mut prev: Option<EpPoint> = None;
            for x in pts.iter().filter(|x| x.in_cone(s)) {
                let y = f.apply(x).map_err(|e| Failure::new("(∗)", e.to_string()))?;
                check("(∗)", y.in_cone(t) && w.contains(&y), || format!("[{s}] → [{t}] sends {x} ∈ W to {y}"))?;
                check("(∗)", prev.as_ref().is_none_or(|p| *p < y), || format!("[{s}] → [{t}] is not increasing at {x}"))?;
                prev = Some(y);
            }
            for y in pts.iter().filter(|y| y.in_cone(t)) {
                let x = f.apply_inverse(y).map_err(|e| Failure::new("(∗)", e.to_string()))?;
                check("(∗)", w.contains(&x), || format!("[{s}] → [{t}] pulls {y} ∈ W back to {x}"))?;
            }
        }
    }
    Ok(())
}

/// Absorbed points of `D` go into `E`, and absorbed points of `E` come from `D`.
fn check_arrow_transport(h: &LiftedHomeo, hy: &ArrowMap) -> std::result::Result<(), Failure> {
    let s = h.run.current();
    let (d, e) = (&h.pipeline.instance.d, &h.pipeline.instance.e);
    let window = 4 * s.n.max(4);
    for x in d.enumerate(window).iter().filter(|x| s.in_g0(&x.base)) {
        let y = hy.apply(x).map_err(|err| Failure::new("arrow-transport", err.to_string()))?;
        check("arrow-transport", e.contains(&y), || format!("H({x}) = {y} ∉ E"))?;
    }
    for y in e.enumerate(window).iter().filter(|y| s.in_g1(&y.base)) {
        let x = hy.apply_inverse(y).map_err(|err| Failure::new("arrow-transport", err.to_string()))?;
        check("arrow-transport", d.contains(&x), || format!("H⁻¹({y}) = {x} ∉ D"))?;
    }
    Ok(())
}

/// `π^Y_F ∘ H = h_F ∘ π^Y_F` and `π^Y_∅ ∘ H = h ∘ π^Y_∅`.
fn check_commuting(
    p: &ArrowPipeline,
    h0: &ArrowMap,
    hf: &ArrowMap,
    hy: &ArrowMap,
    samples: &[ArrowPoint],
) -> std::result::Result<(), Failure> {
    let cantor = ArrowPresentation::cantor();
    let err = |e: Error| Failure::new("commuting", e.to_string());
    for x in samples {
        let hx = hy.apply(x).map_err(err)?;
        for (target, map) in [(&p.f, hf), (&cantor, h0)] {
            let lhs = arrow_project(&hx, &p.y, target).map_err(err)?;
            let rhs = map.apply(&arrow_project(x, &p.y, target).map_err(err)?).map_err(err)?;
            check("commuting", lhs == rhs, || format!("at {x}: π(H(x)) = {lhs} but h(π(x)) = {rhs}"))?;
        }
    }
    Ok(())
}

fn check_order(hy: &ArrowMap, samples: &[ArrowPoint]) -> std::result::Result<(), Failure> {
    let mut pts = samples.to_vec();
    pts.sort();
    pts.dedup();
    let mut prev: Option<(ArrowPoint, ArrowPoint)> = None;
    for x in pts {
        let y = hy.apply(&x).map_err(|e| Failure::new("order", e.to_string()))?;
        if let Some((px, py)) = &prev {
            check("order", *py < y, || format!("{px} < {x} but H({px}) = {py} ≥ H({x}) = {y}"))?;
        }
        prev = Some((x, y));
    }
    Ok(())
}

/// The points over the first `n` enumerated points of `2^ω`, in the carrier.
pub fn sample_arrow_points(carrier: &ArrowPresentation, n: usize) -> Vec<ArrowPoint> {
    SetPresentation::all().enumerate(n).iter().flat_map(|x| carrier.fiber(x)).collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::arrow::arrow_compare;
    use crate::word::w;

    fn class(v: &str) -> TailClass {
        TailClass::from_period(&w(v)).unwrap()
    }

    pub(crate) fn standard() -> ArrowInstance {
        ArrowInstance {
            y: SetPresentation::classes(["01", "001", "011", "0001", "0011", "0111"].map(class)),
            d: ArrowSet::new([(class("01"), vec![1]), (class("001"), vec![0, 1])]),
            e: ArrowSet::new([(class("0001"), vec![1]), (class("0111"), vec![0, 1])]),
        }
    }

    #[test]
    fn derived_sets() {
        let p = ArrowPipeline::new(standard()).unwrap();
        assert_eq!(p.z, SetPresentation::classes(["011", "0011"].map(class)));
        assert_eq!(p.f.x, SetPresentation::classes(["01", "001", "0001", "0111"].map(class)));
        assert!(check_w_disjoint(&p).is_ok());
    }

    #[test]
    fn eight_stages_certify() {
        let h = arrow_cdh_synthesize(&standard(), 8).unwrap();
        let samples = sample_arrow_points(&h.pipeline.y, 60);
        let cert = certify_arrow(&h, &samples);
        assert!(cert.passed(), "{:#?}", cert.failures().collect::<Vec<_>>());
    }

    #[test]
    fn d_equals_e_runs() {
        let mut i = standard();
        i.e = i.d.clone();
        let h = arrow_cdh_synthesize(&i, 6).unwrap();
        let cert = certify_arrow(&h, &sample_arrow_points(&h.pipeline.y, 40));
        assert!(cert.passed(), "{:#?}", cert.failures().collect::<Vec<_>>());
    }

    #[test]
    fn evaluation_matches_stage_map() {
        let mut h = arrow_cdh_synthesize(&standard(), 0).unwrap();
        let d0 = h.pipeline.instance.d.enumerate(1).remove(0);
        match h.evaluate(&d0, 8).unwrap() {
            ArrowEvaluation::Exact(q) => assert!(h.pipeline.instance.e.contains(&q)),
            other => panic!("{other:?}"),
        }
        let x = ArrowPoint::new(EpPoint::parse_normalized("(00111)").unwrap(), 0);
        let ArrowEvaluation::Cone(c8) = h.evaluate(&x, 8).unwrap() else { panic!() };
        let ArrowEvaluation::Cone(c12) = h.evaluate(&x, 12).unwrap() else { panic!() };
        assert!(c8.len() >= 8 && c8.is_prefix_of(&c12));
    }

    #[test]
    fn sides_must_pair_up() {
        let mut i = standard();
        i.e = ArrowSet::new([(class("0001"), vec![0]), (class("0111"), vec![0, 1])]);
        assert!(matches!(ArrowPipeline::new(i), Err(Error::InstanceRejected(_))));
        let mut i = standard();
        i.y = SetPresentation::classes(["0", "01", "001", "0001", "0111"].map(class));
        assert!(matches!(ArrowPipeline::new(i), Err(Error::InstanceRejected(_))));
    }

    #[test]
    fn samples_are_in_the_carrier() {
        let p = ArrowPipeline::new(standard()).unwrap();
        let pts = sample_arrow_points(&p.y, 30);
        for pair in pts.windows(2) {
            assert!(arrow_compare(&p.y, &pair[0], &pair[1]).is_ok());
        }
    }
}
