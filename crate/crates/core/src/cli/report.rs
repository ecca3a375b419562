use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    ChannelOk,
    EavesdropperDetected,
    /// Bob's recovered message differs from what Alice sent.
    MessageCorrupted,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::ChannelOk => "CHANNEL-OK",
            Verdict::EavesdropperDetected => "EAVESDROPPER-DETECTED",
            Verdict::MessageCorrupted => "MESSAGE-CORRUPTED",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass | Verdict::ChannelOk => 0,
            Verdict::EavesdropperDetected | Verdict::MessageCorrupted => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub config: Value,
    pub result: Value,
    pub verdict: Verdict,
}

/// Rounds to 12 significant digits so reports do not depend on the last
/// bits of floating-point noise.
pub(crate) fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    // avoid emitting -0.0
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

/// Rebuilds every object with keys inserted in sorted order.
fn canonical(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let sorted: BTreeMap<String, Value> = map.into_iter().map(|(k, v)| (k, canonical(v))).collect();
            Value::Object(sorted.into_iter().collect::<Map<String, Value>>())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonical).collect()),
        other => other,
    }
}

impl Report {
    pub fn to_value(&self) -> Value {
        canonical(serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "tool": { "name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION") },
            "config": self.config,
            "result": self.result,
            "verdict": self.verdict.as_str(),
        }))
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_value()).expect("report serializes");
        text.push('\n');
        text
    }
}

/// Writes the report to `path`, or to standard output when `None`.
pub fn emit_report(report: &Report, path: Option<&Path>) -> io::Result<()> {
    let text = report.to_json();
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()
        }
    }
}
