//! Acceptance criteria 1–9. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use cantor_cdh::arrow::{
    arrow_cdh_synthesize, arrow_project, certify_arrow, lift, sample_arrow_points, ArrowInstance, ArrowMap,
    ArrowPresentation, ArrowSet,
};
use cantor_cdh::clopen::{ClopenSet, CombineMode};
use cantor_cdh::conemap::{monotone_at, Mode, PiecewiseConeHomeo, SingularAssignment};
use cantor_cdh::document::{CertificateReport, Dump, Instance, Synthesizer};
use cantor_cdh::engine::{certify, monotonicity_witnesses, synthesize, EvaluableHomeo, Evaluation, PlainPolicy, ProblemInstance};
use cantor_cdh::error::Error;
use cantor_cdh::interval::interval_decompose;
use cantor_cdh::krcover::{build_kr_cover, verify_kr_cover, Regime};
use cantor_cdh::point::EpPoint;
use cantor_cdh::tailclass::{SetPresentation, TailClass};
use cantor_cdh::word::Word;
use common::*;
use rand::RngExt;

const STAGE_BUDGET: Duration = Duration::from_secs(10);
const CDH_STAGES: usize = 32;
const ORDERED_STAGES: usize = 16;
const TRANSPORT_POINTS: usize = 16;
const TRANSPORT_CAP: usize = 128;
const TAIL_POINTS: usize = 200;
const EVAL_POINTS: usize = 100;
const RESOLUTIONS: [usize; 5] = [4, 8, 12, 16, 20];
const KR_CASES: usize = 100;
const KR_DEPTH: usize = 12;
const CLOPEN_DEPTH: usize = 10;
const TAIL_PAIRS: usize = 500;
const ARROW_POINTS: usize = 200;
const SEED: u64 = 20_240_601;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn class(v: &str) -> TailClass {
    TailClass::from_period(&v.parse::<Word>().unwrap()).unwrap()
}

fn standard_ep() -> ProblemInstance {
    ProblemInstance {
        x: SetPresentation::all(),
        d0: SetPresentation::classes([class("0"), class("1")]),
        d1: SetPresentation::classes([class("001")]),
    }
}

fn standard_arrow() -> ArrowInstance {
    ArrowInstance {
        y: SetPresentation::classes(["01", "001", "011", "0001", "0011", "0111"].map(class)),
        d: ArrowSet::new([(class("01"), vec![1]), (class("001"), vec![0, 1])]),
        e: ArrowSet::new([(class("0001"), vec![1]), (class("0111"), vec![0, 1])]),
    }
}

fn failures(c: &cantor_cdh::certificate::Certificate) -> String {
    c.failures().map(|v| format!("{} {}", v.clause, v.witness.clone().unwrap_or_default())).collect::<Vec<_>>().join("; ")
}

fn stage_clauses() -> Outcome {
    let t = Instant::now();
    let (policy, run) = synthesize(&standard_ep(), CDH_STAGES).map_err(|e| e.to_string())?;
    let cert = certify(&run, &policy, 16);
    let took = t.elapsed();
    ensure!(cert.passed(), "{}", failures(&cert));
    for c in ["(a)", "(b)", "(c)", "(d)", "(e)", "(f)", "(g)", "(h)"] {
        ensure!(cert.verdict(c).is_some(), "clause {c} not checked");
    }
    ensure!(took < STAGE_BUDGET, "took {took:?}");
    Ok(format!("{CDH_STAGES} stages, (a)–(h) pass, {:.2}s", took.as_secs_f64()))
}

fn dense_transport() -> Outcome {
    let inst = standard_ep();
    let mut h = EvaluableHomeo::new(PlainPolicy::new(inst.clone()).map_err(|e| e.to_string())?);
    let (xs, ys) = (inst.d0.enumerate(TRANSPORT_POINTS), inst.d1.enumerate(TRANSPORT_POINTS));
    let mut n = 0;
    loop {
        let s = h.run.current();
        if xs.iter().all(|x| s.in_g0(x)) && ys.iter().all(|y| s.in_g1(y)) {
            break;
        }
        ensure!(n < TRANSPORT_CAP, "first {TRANSPORT_POINTS} points of D0 and D1 not absorbed by stage {n}");
        n += 1;
        h.run.drive_to(n, &h.policy).map_err(|e| e.to_string())?;
    }
    let s = h.run.current();
    for x in &xs {
        let y = s.map.apply(x).map_err(|e| e.to_string())?;
        ensure!(inst.d1.contains(&y), "h({x}) = {y} ∉ D1");
    }
    for y in &ys {
        let x = s.map.apply_inverse(y).map_err(|e| e.to_string())?;
        ensure!(inst.d0.contains(&x), "h⁻¹({y}) = {x} ∉ D0");
    }
    let cert = certify(&h.run, &h.policy, 16);
    let c = cert.verdict("(c)").ok_or("clause (c) not checked")?;
    ensure!(c.passed, "(c): {}", c.witness.clone().unwrap_or_default());
    Ok(format!("{TRANSPORT_POINTS} D0 points forward and {TRANSPORT_POINTS} D1 points backward, exact by stage {n}"))
}

fn tail_preservation() -> Outcome {
    let (_, run) = synthesize(&standard_ep(), CDH_STAGES).map_err(|e| e.to_string())?;
    let state = run.current();
    let mut r = rng(SEED);
    let mut n = 0;
    while n < TAIL_POINTS {
        let x = random_point(&mut r, 10, 6);
        // absorbed points are the singular ones
        if state.in_g0(&x) {
            continue;
        }
        let y = state.map.apply(&x).map_err(|e| e.to_string())?;
        ensure!(y.tail_equiv(&x), "h_{CDH_STAGES}({x}) = {y} is not tail-equivalent");
        n += 1;
    }
    Ok(format!("{TAIL_POINTS} seeded points at n = {CDH_STAGES}"))
}

fn evaluation_coherence() -> Outcome {
    let mut h = EvaluableHomeo::new(PlainPolicy::new(standard_ep()).map_err(|e| e.to_string())?);
    let mut r = rng(SEED + 3);
    for _ in 0..EVAL_POINTS {
        let x = random_point(&mut r, 10, 6);
        let mut prev: Option<Word> = None;
        for k in RESOLUTIONS {
            let e = h.evaluate(&x, k).map_err(|e| e.to_string())?;
            if let Evaluation::Cone(c) = &e {
                ensure!(c.len() >= k, "cone [{c}] for {x} at k = {k} is shorter than k");
            }
            let c = e.cone(k);
            if let Some(p) = &prev {
                ensure!(p.is_prefix_of(&c), "cones for {x} do not nest at k = {k}: [{p}] then [{c}]");
            }
            prev = Some(c);
            let y = match &e {
                Evaluation::Exact(y) => y.clone(),
                Evaluation::Cone(_) => h.run.current().map.apply(&x).map_err(|e| e.to_string())?,
            };
            ensure!(e.admits(&y), "h_n({x}) = {y} outside the evaluation at k = {k}");
            let back = h.evaluate_inverse(&y, k).map_err(|e| e.to_string())?;
            ensure!(back.admits(&x), "inverse evaluation of {y} at k = {k} misses {x}");
        }
    }
    Ok(format!("{EVAL_POINTS} points at k = {RESOLUTIONS:?}"))
}

fn random_anchors(r: &mut rand_chacha::ChaCha8Rng) -> (Vec<EpPoint>, Vec<EpPoint>) {
    let n = r.random_range(1..=6);
    let pick = |r: &mut rand_chacha::ChaCha8Rng| {
        let mut s = std::collections::BTreeSet::new();
        while s.len() < n {
            s.insert(random_point(r, 8, 4));
        }
        s.into_iter().collect::<Vec<_>>()
    };
    let a = pick(r);
    let mut b = pick(r);
    for i in (1..b.len()).rev() {
        b.swap(i, r.random_range(0..=i));
    }
    (a, b)
}

fn kr_suite() -> Outcome {
    let mut r = rng(SEED + 5);
    let (mut rerouted, mut overlapped) = (0, 0);
    for case in 0..KR_CASES {
        let (a, b) = random_anchors(&mut r);
        let min_depth = r.random_range(1..=8);
        let c = build_kr_cover(&a, &b, Regime::Plain, min_depth).map_err(|e| format!("case {case}: {e}"))?;
        let cert = verify_kr_cover(&c, KR_DEPTH);
        ensure!(cert.passed(), "case {case}: {}", failures(&cert));
        if c.radial.len() >= 2 {
            let mut t = c.clone();
            let last = t.radial.len() - 1;
            let (v0, b0) = (t.radial[0].center_v.clone(), t.radial[0].base_v.clone());
            t.radial[0].center_v = t.radial[last].center_v.clone();
            t.radial[0].base_v = t.radial[last].base_v.clone();
            t.radial[last].center_v = v0;
            t.radial[last].base_v = b0;
            let f = verify_kr_cover(&t, KR_DEPTH);
            let first = f.first_failure().map(|v| v.clause.clone());
            ensure!(first.as_deref() == Some("(4)"), "case {case}: re-routed centers gave {first:?}");
            rerouted += 1;
        }
        if let (Some(u), Some(v)) = (c.pieces_u.first().cloned(), c.pieces_v.first().cloned()) {
            let mut t = c.clone();
            t.pieces_u.push(u.child(0));
            t.pieces_v.push(v.child(0));
            t.alpha.push(t.alpha.len());
            let f = verify_kr_cover(&t, KR_DEPTH);
            let first = f.first_failure().map(|v| v.clause.clone());
            ensure!(first.as_deref() == Some("(1)"), "case {case}: overlapping pieces gave {first:?}");
            overlapped += 1;
        }
    }
    ensure!(rerouted > 0 && overlapped > 0, "fault families not exercised ({rerouted}, {overlapped})");
    Ok(format!("{KR_CASES} covers pass at K = {KR_DEPTH}; {rerouted} re-routes fail (4), {overlapped} overlaps fail (1)"))
}

fn atoms(c: &ClopenSet, k: usize) -> Vec<bool> {
    Word::all_of_length(k).map(|a| c.words().iter().any(|s| s.is_prefix_of(&a))).collect()
}

fn brute_tail_equiv(x: &EpPoint, y: &EpPoint) -> bool {
    let (a, b) = (x.prefix(64), y.prefix(64));
    (0..=16).any(|m| (0..=16).any(|n| (0..48).all(|i| a.digit(m + i) == b.digit(n + i))))
}

fn oracles() -> Outcome {
    let mut r = rng(SEED + 6);
    for case in 0..20 {
        let set = |r: &mut rand_chacha::ChaCha8Rng| {
            let n = r.random_range(0..8);
            ClopenSet::normalize((0..n).map(|_| random_word(r, CLOPEN_DEPTH)).collect::<Vec<_>>())
        };
        let (a, b) = (set(&mut r), set(&mut r));
        let (ta, tb) = (atoms(&a, CLOPEN_DEPTH), atoms(&b, CLOPEN_DEPTH));
        ensure!(ta.len() == 1 << CLOPEN_DEPTH, "atom count");
        for mode in [CombineMode::Union, CombineMode::Intersection, CombineMode::Difference, CombineMode::ComplementOfA] {
            let got = atoms(&a.combine(&b, mode), CLOPEN_DEPTH);
            let bad = (0..ta.len()).find(|&i| {
                let (x, y) = (ta[i], tb[i]);
                got[i]
                    != match mode {
                        CombineMode::Union => x || y,
                        CombineMode::Intersection => x && y,
                        CombineMode::Difference => x && !y,
                        CombineMode::ComplementOfA => !x,
                    }
            });
            ensure!(bad.is_none(), "case {case}: {mode:?} wrong at atom {}", bad.unwrap());
        }
    }
    let mut equiv = 0;
    for i in 0..TAIL_PAIRS {
        let x = random_point(&mut r, 8, 6);
        let y = if i % 2 == 0 {
            x.shift(r.random_range(0..6)).prepend(&random_word(&mut r, 8))
        } else {
            random_point(&mut r, 8, 6)
        };
        let got = x.tail_equiv(&y);
        ensure!(got == brute_tail_equiv(&x, &y), "tail_equiv({x}, {y}) = {got}");
        equiv += got as usize;
    }
    for _ in 0..20 {
        let a = random_non_q(&mut r, 4, 5).prepend(&"0".parse::<Word>().unwrap());
        let b = random_non_q(&mut r, 4, 5).prepend(&"1".parse::<Word>().unwrap());
        let d = interval_decompose(&a, &b, 8).map_err(|e| e.to_string())?;
        let mut located = Vec::new();
        for t in Word::all_of_length(8) {
            for tail in ["(0)", "(1)", "(01)", "(0110)"] {
                let x = EpPoint::parse_normalized(tail).unwrap().prepend(&t);
                let inside = a < x && x < b;
                match d.locate(&x) {
                    None => ensure!(!inside, "{x} ∈ ({a},{b}) not located"),
                    Some(n) => {
                        ensure!(inside, "{x} ∉ ({a},{b}) located at {n}");
                        ensure!(x.in_cone(&d.piece(n)), "{x} ∉ [s_{n}]");
                        located.push((x, n));
                    }
                }
            }
        }
        located.sort();
        for w in located.windows(2) {
            ensure!(w[0].1 <= w[1].1, "order: {} < {} but indices {} > {}", w[0].0, w[1].0, w[0].1, w[1].1);
        }
    }
    Ok(format!(
        "clopen at depth {CLOPEN_DEPTH} ({} atoms, 4 modes); {TAIL_PAIRS} tail pairs ({equiv} equivalent); intervals at depth 8",
        1 << CLOPEN_DEPTH
    ))
}

fn ordered_suite() -> Outcome {
    let h = arrow_cdh_synthesize(&standard_arrow(), ORDERED_STAGES).map_err(|e| e.to_string())?;
    let p = &h.pipeline;
    let cert = certify(&h.run, &p.policy, 16);
    ensure!(cert.passed(), "{}", failures(&cert));
    for c in ["(a)", "(b)", "(c)", "(d)", "(e)", "(f)", "(g)", "(h)", "(i)"] {
        ensure!(cert.verdict(c).is_some(), "clause {c} not checked");
    }
    let ws = monotonicity_witnesses(&h.run, &p.z);
    ensure!(ws.len() >= 16, "only {} W points absorbed", ws.len());
    let map = &h.run.current().map;
    for m in ws.iter().take(16) {
        let v = monotone_at(map, &m.x).map_err(|e| e.to_string())?;
        ensure!(v.monotone, "not monotone at {}", m.x);
        let (a, b) = v.witness.ok_or_else(|| format!("no witness at {}", m.x))?;
        ensure!(a < m.x && m.x < b, "witness ({a}, {b}) does not bracket {}", m.x);
    }
    Ok(format!("{ORDERED_STAGES} stages, (a)–(i) pass, monotone at the first 16 absorbed W points"))
}

fn lifting() -> Outcome {
    let h = arrow_cdh_synthesize(&standard_arrow(), ORDERED_STAGES).map_err(|e| e.to_string())?;
    let p = &h.pipeline;
    let [h0, hf, hy] = p.lifts(h.run.current()).map_err(|e| e.to_string())?;
    let cantor = ArrowPresentation::cantor();
    let mut r = rng(SEED + 8);
    let mut pts = Vec::new();
    for _ in 0..ARROW_POINTS {
        let base = random_point(&mut r, 8, 6);
        let fiber = p.y.fiber(&base);
        let x = fiber[r.random_range(0..fiber.len())].clone();
        for (target, map) in [(&p.f, &hf), (&cantor, &h0)] {
            let hx = hy.apply(&x).map_err(|e| e.to_string())?;
            let lhs = arrow_project(&hx, &p.y, target).map_err(|e| e.to_string())?;
            let rhs = map.apply(&arrow_project(&x, &p.y, target).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            ensure!(lhs == rhs, "at {x}: π(H(x)) = {lhs}, h(π(x)) = {rhs}");
        }
        pts.push(x);
    }
    let cert = certify_arrow(&h, &sample_arrow_points(&p.y, 32));
    ensure!(cert.passed(), "{}", failures(&cert));
    let g = PiecewiseConeHomeo::new(
        vec![],
        vec![SingularAssignment::new(
            Word::empty(),
            EpPoint::parse_normalized("(01)").unwrap(),
            Word::empty(),
            EpPoint::parse_normalized("(0011)").unwrap(),
            Mode::Unordered,
        )],
    )
    .map_err(|e| e.to_string())?;
    let y = ArrowPresentation::new(SetPresentation::classes([class("01"), class("0011")])).map_err(|e| e.to_string())?;
    match lift(&ArrowMap::on_cantor(g), &y) {
        Err(Error::LiftRejected { point, .. }) => ensure!(point == "⟨(01),0⟩", "rejected at {point}"),
        other => return Err(format!("non-monotone map was not rejected: {other:?}")),
    }
    Ok(format!("π∘H = h∘π on {} seeded points; non-monotone lift rejected", pts.len()))
}

fn determinism() -> Outcome {
    let instances = [
        Instance::Cdh(standard_ep()),
        Instance::Ordered(cantor_cdh::arrow::OrderedInstance {
            d0: SetPresentation::classes([class("01")]),
            d1: SetPresentation::classes([class("001")]),
            w: SetPresentation::classes([class("011")]),
        }),
        Instance::Arrow(standard_arrow()),
    ];
    let once = |i: &Instance| -> Result<(String, String), String> {
        let mut s = Synthesizer::new(i).map_err(|e| e.to_string())?;
        s.drive_to(8).map_err(|e| e.to_string())?;
        let dump = Dump { instance: i.clone(), run: s.run().clone() };
        let report = CertificateReport::new("run", Some(i.mode()), Some(8), s.certify(16));
        Ok((dump.to_json(), report.to_json()))
    };
    for i in &instances {
        let (d1, r1) = once(i)?;
        let (d2, r2) = once(i)?;
        ensure!(d1 == d2, "{:?} dumps differ", i.mode());
        ensure!(r1 == r2, "{:?} reports differ", i.mode());
        let back = Dump::parse(&d1).map_err(|e| e.to_string())?;
        ensure!(back.to_json() == d1, "{:?} dump does not round-trip", i.mode());
    }
    Ok("cdh, ordered and arrow dumps and reports byte-identical".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("stage clauses", stage_clauses),
        ("dense transport", dense_transport),
        ("tail preservation", tail_preservation),
        ("evaluation coherence", evaluation_coherence),
        ("KR covers", kr_suite),
        ("oracle equivalence", oracles),
        ("ordered suite", ordered_suite),
        ("lifting", lifting),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(m) => println!("criterion {}: PASS {name}: {m}", i + 1),
            Err(m) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {m}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
