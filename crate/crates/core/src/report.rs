//! Deterministic JSON reports.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::templicial::Witness;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// A failed identity, located by the path of the case that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessEntry {
    pub path: String,
    pub identity: String,
    pub indices: Vec<usize>,
    pub generator: String,
    pub involved: Vec<String>,
}

impl WitnessEntry {
    pub fn new(path: &str, w: &Witness) -> WitnessEntry {
        WitnessEntry {
            path: path.into(),
            identity: w.identity.clone(),
            indices: w.indices.clone(),
            generator: w.generator.clone(),
            involved: w.involved.clone(),
        }
    }

    /// A failure that is not tied to a structure map.
    pub fn message(path: &str, msg: &str) -> WitnessEntry {
        WitnessEntry { path: path.into(), identity: msg.into(), indices: vec![], generator: String::new(), involved: vec![] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseResult {
    pub path: String,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub seed: u64,
    pub ring: String,
    pub dim: usize,
    pub cases: Vec<CaseResult>,
    pub witnesses: Vec<WitnessEntry>,
    /// Command output (fixtures, fillers, tables).
    pub output: serde_json::Value,
    /// Milliseconds per case; empty unless requested, so reports stay reproducible.
    pub timings: BTreeMap<String, u64>,
}

impl Report {
    pub fn new(command: &str, seed: u64, ring: String, dim: usize) -> Report {
        Report {
            command: command.into(),
            status: Status::Pass,
            seed,
            ring,
            dim,
            cases: vec![],
            witnesses: vec![],
            output: serde_json::Value::Null,
            timings: BTreeMap::new(),
        }
    }

    pub fn pass(&mut self, path: &str) {
        self.cases.push(CaseResult { path: path.into(), status: Status::Pass });
    }

    pub fn fail(&mut self, entry: WitnessEntry) {
        self.cases.push(CaseResult { path: entry.path.clone(), status: Status::Fail });
        self.witnesses.push(entry);
        if self.status == Status::Pass {
            self.status = Status::Fail;
        }
    }

    /// Records the outcome of a check under `path`.
    pub fn record(&mut self, path: &str, r: std::result::Result<(), Witness>) {
        match r {
            Ok(()) => self.pass(path),
            Err(w) => self.fail(WitnessEntry::new(path, &w)),
        }
    }

    /// Records a boolean expectation.
    pub fn expect(&mut self, path: &str, ok: bool, msg: &str) {
        if ok {
            self.pass(path)
        } else {
            self.fail(WitnessEntry::message(path, msg))
        }
    }

    pub fn error(&mut self, path: &str, msg: &str) {
        self.cases.push(CaseResult { path: path.into(), status: Status::Error });
        self.witnesses.push(WitnessEntry::message(path, msg));
        self.status = Status::Error;
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// 0 on pass, 1 on failure, 2 on errors.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}
