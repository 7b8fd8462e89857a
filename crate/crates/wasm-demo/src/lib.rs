//! Three operations for the demo page: inspect a point, evaluate a synthesized
//! map, and list the cells of a stage.

use cantor_cdh::conemap::Cell;
use cantor_cdh::document::{Instance, RunMode, Synthesizer};
use cantor_cdh::engine::Evaluation;
use cantor_cdh::point::EpPoint;
use cantor_cdh::tailclass::TailClass;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest stage count the page may ask for.
const MAX_STAGES: usize = 24;

fn point(text: &str) -> Result<EpPoint, String> {
    EpPoint::parse_normalized(text.trim()).map_err(|e| e.to_string())
}

fn synthesizer(mode: &str, instance: &str, stages: usize) -> Result<Synthesizer, String> {
    if stages > MAX_STAGES {
        return Err(format!("at most {MAX_STAGES} stages"));
    }
    let mode = RunMode::parse(mode).map_err(|e| e.to_string())?;
    let instance = Instance::parse(mode, instance).map_err(|e| e.to_string())?;
    let mut s = Synthesizer::new(&instance).map_err(|e| e.to_string())?;
    s.drive_to(stages).map_err(|e| e.to_string())?;
    Ok(s)
}

pub fn inspect_json(a: &str, b: &str) -> Result<Value, String> {
    let x = point(a)?;
    let mut out = json!({
        "canonical": x.to_string(),
        "class": TailClass::of(&x).to_string(),
        "rational": x.in_q(),
        "prefix16": x.prefix(16).to_string(),
    });
    if !b.trim().is_empty() {
        let y = point(b)?;
        out["other"] = json!(y.to_string());
        out["tail_equivalent"] = json!(x.tail_equiv(&y));
        out["order"] = json!(format!("{:?}", x.cmp(&y)));
    }
    Ok(out)
}

pub fn evaluate_json(mode: &str, instance: &str, x: &str, k: usize) -> Result<Value, String> {
    let x = point(x)?;
    let k = k.min(64);
    let mut s = synthesizer(mode, instance, 0)?;
    let (exact, text) = match &mut s {
        Synthesizer::Cdh(h) => show(h.evaluate(&x, k).map_err(|e| e.to_string())?),
        Synthesizer::Ordered(h) => show(h.evaluate(&x, k).map_err(|e| e.to_string())?),
        Synthesizer::Arrow(h) => {
            let p = cantor_cdh::arrow::ArrowPoint::new(x.clone(), 0);
            match h.evaluate(&p, k).map_err(|e| e.to_string())? {
                cantor_cdh::arrow::ArrowEvaluation::Exact(q) => (true, q.to_string()),
                cantor_cdh::arrow::ArrowEvaluation::Cone(w) => (false, cone(&w.to_string())),
            }
        }
    };
    Ok(json!({ "point": x.to_string(), "k": k, "stage": s.run().current().n, "exact": exact, "value": text }))
}

fn cone(w: &str) -> String {
    if w.is_empty() {
        "(ε)".into()
    } else {
        w.into()
    }
}

fn show(e: Evaluation) -> (bool, String) {
    match e {
        Evaluation::Exact(p) => (true, p.to_string()),
        Evaluation::Cone(w) => (false, cone(&w.to_string())),
    }
}

pub fn stage_json(mode: &str, instance: &str, stages: usize) -> Result<Value, String> {
    let s = synthesizer(mode, instance, stages)?;
    let state = s.run().current();
    let cells: Vec<Value> = state
        .map
        .cells()
        .map(|c| match c {
            Cell::Piece(p) => json!({ "kind": "piece", "source": p.source.to_string(), "target": p.target.to_string() }),
            Cell::Singular(a) => json!({
                "kind": "singular",
                "source": a.base_p.to_string(),
                "target": a.base_q.to_string(),
                "center": a.p.to_string(),
                "image": a.q.to_string(),
            }),
        })
        .collect();
    let cert = s.certify(8);
    Ok(json!({
        "stage": state.n,
        "absorbed": state.g0.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "cells": cells,
        "passed": cert.passed(),
        "failures": cert.failures().map(|v| v.clause.clone()).collect::<Vec<_>>(),
    }))
}

/// Canonical form, tail class and, when `b` is nonempty, comparison with `b`.
#[wasm_bindgen]
pub fn inspect(a: &str, b: &str) -> Result<String, JsError> {
    inspect_json(a, b).map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

/// Value of the limit map at `x` to resolution `k`.
#[wasm_bindgen]
pub fn evaluate(mode: &str, instance: &str, x: &str, k: usize) -> Result<String, JsError> {
    evaluate_json(mode, instance, x, k).map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

/// Cells of `h_n` and its certificate verdict.
#[wasm_bindgen]
pub fn stage(mode: &str, instance: &str, stages: usize) -> Result<String, JsError> {
    stage_json(mode, instance, stages).map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}
