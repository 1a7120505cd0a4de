//! Reproducible run reports: canonical inputs, a digest, and the
//! verdicts sorted by check id. Identical (inputs, horizon, seed)
//! produce byte-identical reports apart from the elapsed field.

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use filterlab_core::filters::Verdict;

pub struct ReportBuilder {
    command: String,
    inputs: Value,
    horizon: u64,
    seed: u64,
    checks: Vec<(String, Verdict)>,
    extras: Vec<Value>,
    started: std::time::Instant,
}

impl ReportBuilder {
    pub fn new(command: &str, inputs: Value, horizon: u64, seed: u64) -> Self {
        ReportBuilder {
            command: command.to_string(),
            inputs,
            horizon,
            seed,
            checks: Vec::new(),
            extras: Vec::new(),
            started: std::time::Instant::now(),
        }
    }

    pub fn push(&mut self, id: impl Into<String>, verdict: Verdict) {
        self.checks.push((id.into(), verdict));
    }

    /// Typed construction certificates (extraction reports, Walsh
    /// reports, ...) carried alongside the verdicts.
    pub fn push_extra(&mut self, kind: &str, payload: Value) {
        self.extras.push(json!({ "kind": kind, "payload": payload }));
    }

    pub fn finish(mut self) -> Value {
        self.checks.sort_by(|a, b| a.0.cmp(&b.0));
        let verdicts: Vec<Value> = self
            .checks
            .iter()
            .map(|(id, v)| json!({ "id": id, "verdict": serde_json::to_value(v).unwrap() }))
            .collect();
        let digest = {
            let canonical = serde_json::to_string(&self.inputs).unwrap_or_default();
            let mut hasher = Sha256::new();
            hasher.update(canonical.as_bytes());
            hex_string(&hasher.finalize())
        };
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "inputsDigest": digest,
            "verdicts": verdicts,
            "certificates": self.extras,
            "horizon": self.horizon,
            "seed": self.seed,
            "elapsedMs": self.started.elapsed().as_millis() as u64,
            "version": env!("CARGO_PKG_VERSION"),
        })
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Exit-code contract: 0 proved/success, 10 refuted, 20 consistent.
pub fn exit_code_for(verdicts: &[&Verdict]) -> i32 {
    use filterlab_core::filters::Status;
    let mut worst = 0;
    for v in verdicts {
        let code = match v.status {
            Status::Proved => 0,
            Status::Refuted => 10,
            Status::Consistent => 20,
        };
        worst = worst.max(code);
    }
    worst
}
