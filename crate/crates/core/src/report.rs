use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// Combine statuses: any failure fails, otherwise any inconclusive is
    /// inconclusive.
    pub fn all<I: IntoIterator<Item = Status>>(items: I) -> Status {
        let mut out = Status::Pass;
        for s in items {
            match s {
                Status::Fail => return Status::Fail,
                Status::Inconclusive => out = Status::Inconclusive,
                Status::Pass => {}
            }
        }
        out
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        })
    }
}

/// One named check. `margin` is signed so that positive means "inside the
/// tolerance by this much"; its exact meaning is per check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub name: String,
    pub anchor: String,
    pub status: Status,
    pub margin: f64,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub witnesses: serde_json::Value,
}

impl Entry {
    pub fn new(name: &str, anchor: &str, status: Status, margin: f64) -> Self {
        Entry {
            name: name.to_string(),
            anchor: anchor.to_string(),
            status,
            margin: sanitize(margin),
            witnesses: serde_json::Value::Null,
        }
    }

    pub fn with_witnesses(mut self, w: serde_json::Value) -> Self {
        self.witnesses = w;
        self
    }
}

/// Non-finite margins would not survive a JSON round trip.
fn sanitize(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else if x.is_nan() {
        0.0
    } else if x > 0.0 {
        f64::MAX
    } else {
        f64::MIN
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub instance_id: String,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub entries: Vec<Entry>,
}

impl CertificateReport {
    pub fn new(instance_id: impl Into<String>, seed: u64, tolerances: BTreeMap<String, f64>) -> Self {
        CertificateReport { instance_id: instance_id.into(), seed, tolerances, entries: Vec::new() }
    }

    pub fn push(&mut self, e: Entry) {
        self.entries.push(e);
    }

    pub fn extend<I: IntoIterator<Item = Entry>>(&mut self, it: I) {
        self.entries.extend(it);
    }

    pub fn overall(&self) -> Status {
        Status::all(self.entries.iter().map(|e| e.status))
    }

    pub fn entry(&self, name: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
