//! Per-axiom verdicts and the report structure emitted by every checker.

use serde::{Deserialize, Serialize};

/// Outcome of one checked law.
///
/// `Fail` always carries a replayable counterexample tuple; `Inconclusive` is
/// reserved for bounded existential searches that exhausted the fragment without
/// either a witness or the right to refute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

/// One axiom's outcome over a fragment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomEntry {
    pub axiom: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<Vec<String>>,
    pub note: String,
}

impl AxiomEntry {
    pub fn pass(axiom: &str, note: impl Into<String>) -> Self {
        AxiomEntry {
            axiom: axiom.to_string(),
            verdict: Verdict::Pass,
            witness: None,
            counterexample: None,
            note: note.into(),
        }
    }

    pub fn pass_with_witness(axiom: &str, witness: Vec<String>, note: impl Into<String>) -> Self {
        AxiomEntry {
            axiom: axiom.to_string(),
            verdict: Verdict::Pass,
            witness: Some(witness),
            counterexample: None,
            note: note.into(),
        }
    }

    pub fn fail(axiom: &str, counterexample: Vec<String>, note: impl Into<String>) -> Self {
        AxiomEntry {
            axiom: axiom.to_string(),
            verdict: Verdict::Fail,
            witness: None,
            counterexample: Some(counterexample),
            note: note.into(),
        }
    }

    pub fn inconclusive(axiom: &str, note: impl Into<String>) -> Self {
        AxiomEntry {
            axiom: axiom.to_string(),
            verdict: Verdict::Inconclusive,
            witness: None,
            counterexample: None,
            note: note.into(),
        }
    }
}

/// All entries produced by one checker run over one instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub instance: String,
    pub entries: Vec<AxiomEntry>,
}

impl AxiomReport {
    pub fn new(instance: impl Into<String>, entries: Vec<AxiomEntry>) -> Self {
        AxiomReport { instance: instance.into(), entries }
    }

    pub fn has_fail(&self) -> bool {
        self.entries.iter().any(|e| e.verdict == Verdict::Fail)
    }

    pub fn entry(&self, axiom: &str) -> Option<&AxiomEntry> {
        self.entries.iter().find(|e| e.axiom == axiom)
    }

    /// Concatenation of several reports over the same instance.
    pub fn merge(mut self, other: AxiomReport) -> AxiomReport {
        self.entries.extend(other.entries);
        self
    }
}
