//! JSON documents: instances, stage dumps, and certificate reports.

use serde::{Deserialize, Serialize};

use crate::arrow::{
    arrow_cdh_synthesize, certify_arrow, sample_arrow_points, ArrowInstance, LiftedHomeo, OrderedInstance,
    OrderedPolicy,
};
use crate::certificate::{Certificate, ClauseVerdict};
use crate::conemap::validate;
use crate::engine::{certify, EngineRun, EvaluableHomeo, PlainPolicy, ProblemInstance};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    Cdh,
    Ordered,
    Arrow,
}

impl RunMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "cdh" => Ok(RunMode::Cdh),
            "ordered" => Ok(RunMode::Ordered),
            "arrow" => Ok(RunMode::Arrow),
            _ => Err(Error::MalformedInput(format!("unknown mode {s:?}"))),
        }
    }
}

/// An instance of any of the three constructions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "instance", rename_all = "lowercase")]
pub enum Instance {
    Cdh(ProblemInstance),
    Ordered(OrderedInstance),
    Arrow(ArrowInstance),
}

impl Instance {
    pub fn parse(mode: RunMode, json: &str) -> Result<Self> {
        let bad = |e: serde_json::Error| Error::MalformedInput(e.to_string());
        Ok(match mode {
            RunMode::Cdh => Instance::Cdh(serde_json::from_str(json).map_err(bad)?),
            RunMode::Ordered => Instance::Ordered(serde_json::from_str(json).map_err(bad)?),
            RunMode::Arrow => Instance::Arrow(serde_json::from_str(json).map_err(bad)?),
        })
    }

    pub fn mode(&self) -> RunMode {
        match self {
            Instance::Cdh(_) => RunMode::Cdh,
            Instance::Ordered(_) => RunMode::Ordered,
            Instance::Arrow(_) => RunMode::Arrow,
        }
    }
}

/// A synthesized map: the instance and every stage of its run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dump {
    #[serde(flatten)]
    pub instance: Instance,
    #[serde(flatten)]
    pub run: EngineRun,
}

impl Dump {
    pub fn parse(json: &str) -> Result<Self> {
        let d: Dump = serde_json::from_str(json).map_err(|e| Error::MalformedInput(e.to_string()))?;
        if d.run.stages.is_empty() {
            return Err(Error::MalformedInput("dump has no stages".into()));
        }
        if d.run.stages.iter().enumerate().any(|(i, s)| s.n != i) {
            return Err(Error::MalformedInput("stages are not numbered 0, 1, 2, …".into()));
        }
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dumps serialize")
    }

    /// Rebuild the synthesizer that produced this dump, with its stages.
    pub fn synthesizer(&self) -> Result<Synthesizer> {
        Synthesizer::with_run(&self.instance, self.run.clone())
    }
}

/// The policy of a run together with its stages.
#[derive(Debug)]
pub enum Synthesizer {
    Cdh(EvaluableHomeo<PlainPolicy>),
    Ordered(EvaluableHomeo<OrderedPolicy>),
    Arrow(LiftedHomeo),
}

impl Synthesizer {
    pub fn new(instance: &Instance) -> Result<Self> {
        Self::with_run(instance, EngineRun::new())
    }

    fn with_run(instance: &Instance, run: EngineRun) -> Result<Self> {
        Ok(match instance {
            Instance::Cdh(i) => Synthesizer::Cdh(EvaluableHomeo::with_run(PlainPolicy::new(i.clone())?, run)),
            Instance::Ordered(i) => Synthesizer::Ordered(EvaluableHomeo::with_run(OrderedPolicy::new(i.clone())?, run)),
            Instance::Arrow(i) => {
                let mut h = arrow_cdh_synthesize(i, 0)?;
                h.run = run;
                Synthesizer::Arrow(h)
            }
        })
    }

    pub fn run(&self) -> &EngineRun {
        match self {
            Synthesizer::Cdh(h) => &h.run,
            Synthesizer::Ordered(h) => &h.run,
            Synthesizer::Arrow(h) => &h.run,
        }
    }

    pub fn drive_to(&mut self, n: usize) -> Result<()> {
        match self {
            Synthesizer::Cdh(h) => h.run.drive_to(n, &h.policy).map(|_| ()),
            Synthesizer::Ordered(h) => h.run.drive_to(n, &h.policy).map(|_| ()),
            Synthesizer::Arrow(h) => h.run.drive_to(n, &h.pipeline.policy).map(|_| ()),
        }
    }

    /// Stage conditions of the active construction, structural validation of
    /// every stage map, and for arrow runs the lift checks on the first
    /// `samples` enumerated bases.
    pub fn certify(&self, samples: usize) -> Certificate {
        let mut cert = match self {
            Synthesizer::Cdh(h) => certify(&h.run, &h.policy, samples),
            Synthesizer::Ordered(h) => certify(&h.run, &h.policy, samples),
            Synthesizer::Arrow(h) => certify_arrow(h, &sample_arrow_points(&h.pipeline.y, samples)),
        };
        cert.record("validate", validate_all(self.run()));
        cert
    }

    pub fn mode(&self) -> RunMode {
        match self {
            Synthesizer::Cdh(_) => RunMode::Cdh,
            Synthesizer::Ordered(_) => RunMode::Ordered,
            Synthesizer::Arrow(_) => RunMode::Arrow,
        }
    }
}

fn validate_all(run: &EngineRun) -> std::result::Result<(), crate::certificate::Failure> {
    for s in &run.stages {
        if let Some(f) = validate(&s.map, 8).first_failure() {
            return Err(crate::certificate::Failure::new(
                "validate",
                format!("stage {}: {} ({})", s.n, f.clause, f.witness.clone().unwrap_or_default()),
            ));
        }
    }
    Ok(())
}

/// Clause verdicts of one checking pass.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub subject: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<RunMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stages: Option<usize>,
    pub passed: bool,
    pub clauses: Vec<ClauseVerdict>,
}

impl CertificateReport {
    pub fn new(subject: &str, mode: Option<RunMode>, stages: Option<usize>, cert: Certificate) -> Self {
        CertificateReport { subject: subject.to_string(), mode, stages, passed: cert.passed(), clauses: cert.clauses }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::tests::standard;

    #[test]
    fn dump_round_trip() {
        let instance = Instance::Cdh(standard());
        let mut s = Synthesizer::new(&instance).unwrap();
        s.drive_to(3).unwrap();
        let dump = Dump { instance, run: s.run().clone() };
        let json = dump.to_json();
        let back = Dump::parse(&json).unwrap();
        assert_eq!(back, dump);
        assert_eq!(back.to_json(), json);
        assert!(back.synthesizer().unwrap().certify(10).passed());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Dump::parse(""), Err(Error::MalformedInput(_))));
        assert!(matches!(Dump::parse("{}"), Err(Error::MalformedInput(_))));
        let bad = r#"{"X":{"kind":"classes","classes":["0()"]},"D0":{"kind":"classes","classes":[]},"D1":{"kind":"classes","classes":[]}}"#;
        assert!(matches!(Instance::parse(RunMode::Cdh, bad), Err(Error::MalformedInput(_))));
    }

    #[test]
    fn instance_json_shape() {
        let json = serde_json::to_value(Instance::Cdh(standard())).unwrap();
        assert_eq!(json["mode"], "cdh");
        assert_eq!(json["instance"]["D1"]["classes"][0], "001");
    }
}
