//! Clause-by-clause verdicts shared by every checker.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseVerdict {
    pub clause: String,
    pub passed: bool,
    /// Short failure kind, e.g. `not-a-partition`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub clauses: Vec<ClauseVerdict>,
}

/// A failed check: kind plus a human-readable witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub kind: String,
    pub witness: String,
}

impl Failure {
    pub fn new(kind: &str, witness: impl Into<String>) -> Self {
        Failure { kind: kind.to_string(), witness: witness.into() }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind, self.witness)
    }
}

impl Certificate {
    pub fn new() -> Self {
        Certificate::default()
    }

    pub fn record(&mut self, clause: &str, outcome: Result<(), Failure>) {
        let (passed, failure, witness) = match outcome {
            Ok(()) => (true, None, None),
            Err(f) => (false, Some(f.kind), Some(f.witness)),
        };
        self.clauses.push(ClauseVerdict { clause: clause.to_string(), passed, failure, witness });
    }

    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ClauseVerdict> {
        self.clauses.iter().filter(|c| !c.passed)
    }

    pub fn first_failure(&self) -> Option<&ClauseVerdict> {
        self.failures().next()
    }

    pub fn verdict(&self, clause: &str) -> Option<&ClauseVerdict> {
        self.clauses.iter().find(|c| c.clause == clause)
    }

    /// Append another certificate's clauses, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: Certificate) {
        for mut c in other.clauses {
            c.clause = format!("{prefix}{}", c.clause);
            self.clauses.push(c);
        }
    }
}
