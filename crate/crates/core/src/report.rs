//! Verdicts, witnesses and the size budgets that bound every exhaustive check.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Bounds on the enumerations performed by the checkers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest base object size considered.
    pub max_obj: usize,
    /// Hom-sets with more matrices than this are sampled.
    pub max_hom: usize,
    /// Pairs of morphisms considered per shape before sampling.
    pub max_pairs: usize,
    /// Largest carrier that may be enumerated element by element.
    pub max_carrier: usize,
    /// Seed for deterministic sampling.
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_obj: 2, max_hom: 256, max_pairs: 256, max_carrier: 6561, seed: 0x5eed }
    }
}

impl Budget {
    pub fn with_max_obj(mut self, n: usize) -> Self {
        self.max_obj = n;
        self
    }

    /// Object sizes `0..=max_obj`.
    pub fn sizes(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.max_obj
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "max_obj={} max_hom={} max_pairs={} max_carrier={}",
            self.max_obj, self.max_hom, self.max_pairs, self.max_carrier
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Nothing within budget could be checked.
    Skipped,
    /// Recorded for information; never affects the exit code.
    Info,
}

/// A concrete counterexample: the bindings that reproduce it and both sides
/// of the violated relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub bindings: Vec<(String, String)>,
    pub lhs: String,
    pub relation: String,
    pub rhs: String,
}

impl Witness {
    pub fn new(relation: &str, lhs: impl Into<String>, rhs: impl Into<String>) -> Self {
        Witness { bindings: Vec::new(), lhs: lhs.into(), relation: relation.into(), rhs: rhs.into() }
    }

    pub fn bind(mut self, name: &str, value: impl fmt::Display) -> Self {
        self.bindings.push((name.into(), value.to_string()));
        self
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binds: Vec<String> = self.bindings.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "[{}] {} {} {}", binds.join(", "), self.lhs, self.relation, self.rhs)
    }
}

/// One checked law.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub law_id: String,
    pub paper_ref: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    pub budget: String,
    /// Number of instances evaluated.
    pub checked: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl Verdict {
    pub fn info(law_id: &str, reference: &str, budget: impl Into<String>, detail: impl Into<String>) -> Self {
        Verdict {
            law_id: law_id.into(),
            paper_ref: reference.into(),
            status: Status::Info,
            witness: None,
            budget: budget.into(),
            checked: 0,
            detail: Some(detail.into()),
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
            Status::Info => "INFO",
        };
        write!(f, "{tag} {:<32} ({} checked)", self.law_id, self.checked)?;
        if let Some(d) = &self.detail {
            write!(f, " {d}")?;
        }
        if let Some(w) = &self.witness {
            write!(f, "\n     witness: {w}")?;
        }
        Ok(())
    }
}

/// Accumulates evaluations of one law, keeping the first counterexample.
#[derive(Debug)]
pub struct Law {
    id: String,
    reference: String,
    budget: String,
    checked: u64,
    witness: Option<Witness>,
    detail: Option<String>,
}

impl Law {
    pub fn new(id: &str, reference: &str, budget: impl fmt::Display) -> Self {
        Law {
            id: id.into(),
            reference: reference.into(),
            budget: budget.to_string(),
            checked: 0,
            witness: None,
            detail: None,
        }
    }

    /// Records one evaluation; the witness is only built on the first failure.
    pub fn check(&mut self, ok: bool, witness: impl FnOnce() -> Witness) -> bool {
        self.checked += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
        ok
    }

    /// Folds in the outcome of a batch evaluated elsewhere.
    pub fn absorb(&mut self, checked: u64, witness: Option<Witness>) {
        self.checked += checked;
        if self.witness.is_none() {
            self.witness = witness;
        }
    }

    pub fn failed(&self) -> bool {
        self.witness.is_some()
    }

    pub fn note(&mut self, detail: impl Into<String>) {
        self.detail = Some(detail.into());
    }

    pub fn finish(self) -> Verdict {
        let status = match (&self.witness, self.checked) {
            (Some(_), _) => Status::Fail,
            (None, 0) => Status::Skipped,
            (None, _) => Status::Pass,
        };
        Verdict {
            law_id: self.id,
            paper_ref: self.reference,
            status,
            witness: self.witness,
            budget: self.budget,
            checked: self.checked,
            detail: self.detail,
        }
    }
}

/// The result of a CLI command.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    /// The normalized invocation, enough to rerun the command for replay.
    #[serde(default)]
    pub invocation: Vec<String>,
    pub input_digest: String,
    pub budgets: BTreeMap<String, String>,
    pub verdicts: Vec<Verdict>,
    /// Human-oriented tables (quotients, fixed points) printed after verdicts.
    pub notes: Vec<String>,
    /// Wall-clock time; the only field left out of [`Report::digest`].
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(Verdict::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| v.status == Status::Fail)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn find(&self, law_id: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.law_id == law_id)
    }

    /// SHA-256 of the JSON form with timings removed.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let timeless = Report { elapsed_ms: None, ..self.clone() };
        let json = serde_json::to_vec(&timeless).expect("reports serialize");
        hex::encode(Sha256::digest(json))
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== {} ==", self.command)?;
        for (k, v) in &self.budgets {
            writeln!(f, "budget {k}: {v}")?;
        }
        for v in &self.verdicts {
            writeln!(f, "{v}")?;
        }
        for n in &self.notes {
            writeln!(f, "{n}")?;
        }
        let fails = self.failures().count();
        write!(f, "{} verdicts, {} failed", self.verdicts.len(), fails)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn law_keeps_first_witness() {
        let mut law = Law::new("x", "ref", Budget::default());
        law.check(true, || unreachable!());
        law.check(false, || Witness::new("=", "a", "b"));
        law.check(false, || Witness::new("=", "c", "d"));
        let v = law.finish();
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.witness.unwrap().lhs, "a");
        assert_eq!(v.checked, 3);
    }

    #[test]
    fn nothing_checked_is_skipped() {
        assert_eq!(Law::new("x", "r", "b").finish().status, Status::Skipped);
    }

    #[test]
    fn verdict_json_roundtrip() {
        let mut law = Law::new("x", "r", "b");
        law.check(false, || Witness::new("<=", "1", "0").bind("X", 1));
        let v = law.finish();
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("\"paper_ref\""));
        assert_eq!(serde_json::from_str::<Verdict>(&s).unwrap(), v);
    }
}
