//! The `verify-certificate` path: replays a run report's certificates
//! without re-running the decision procedures that produced them.

use serde_json::Value;

use filterlab_core::cert;
use filterlab_core::constructions::{
    ExtractionCertificate, FdClaimCertificate, OscillationReport, PerturbationReport, WalshReport,
    WeakConvergenceCertificate,
};
use filterlab_core::filters::Verdict;
use filterlab_core::setalg::json::blocking_from_json;

/// Returns the failure descriptions found in the report; empty = valid.
pub fn verify_report(report: &Value) -> Vec<String> {
    let mut failures = Vec::new();
    // 1. Replay every numeric record in every verdict.
    if let Some(verdicts) = report.get("verdicts").and_then(Value::as_array) {
        for entry in verdicts {
            let id = entry.get("id").and_then(Value::as_str).unwrap_or("?");
            match entry
                .get("verdict")
                .map(|v| serde_json::from_value::<Verdict>(v.clone()))
            {
                Some(Ok(verdict)) => {
                    for f in cert::verify_verdict_numeric(&verdict) {
                        failures.push(format!("{id}: {f}"));
                    }
                    // Selector re-verification when the inputs carry a
                    // blocking.
                    if let Some(blocking_json) =
                        report.get("inputs").and_then(|i| i.get("blocking"))
                    {
                        if let Ok(blocking) = blocking_from_json(blocking_json) {
                            if let filterlab_core::filters::Certificate::BlockSelector {
                                selector,
                                ..
                            } = &verdict.certificate
                            {
                                let horizon =
                                    report.get("horizon").and_then(Value::as_u64).unwrap_or(1024);
                                if let Err(e) =
                                    cert::reverify_block_selector(selector, &blocking, horizon)
                                {
                                    failures.push(format!("{id}: {e}"));
                                }
                            }
                        }
                    }
                }
                Some(Err(e)) => failures.push(format!("{id}: unreadable verdict: {e}")),
                None => failures.push(format!("{id}: missing verdict")),
            }
        }
    } else {
        failures.push("report has no verdicts array".into());
    }
    // 2. Typed construction certificates.
    if let Some(extras) = report.get("certificates").and_then(Value::as_array) {
        for extra in extras {
            let kind = extra.get("kind").and_then(Value::as_str).unwrap_or("?");
            let payload = match extra.get("payload") {
                Some(p) => p,
                None => {
                    failures.push(format!("certificate {kind}: missing payload"));
                    continue;
                }
            };
            match kind {
                "perturbation" => {
                    match serde_json::from_value::<PerturbationReport>(payload.clone()) {
                        Ok(r) => {
                            if let Err(e) = cert::reverify_perturbation(&r) {
                                failures.push(format!("perturbation: {e}"));
                            }
                        }
                        Err(e) => failures.push(format!("perturbation: unreadable: {e}")),
                    }
                }
                "extraction" => {
                    match serde_json::from_value::<ExtractionCertificate>(payload.clone()) {
                        Ok(c) => {
                            if !c.verify() {
                                failures.push("extraction: a recorded inequality fails".into());
                            }
                            if let Err(e) = cert::reverify_perturbation(&c.perturbation) {
                                failures.push(format!("extraction/perturbation: {e}"));
                            }
                        }
                        Err(e) => failures.push(format!("extraction: unreadable: {e}")),
                    }
                }
                "fd-claim" => match serde_json::from_value::<FdClaimCertificate>(payload.clone()) {
                    Ok(c) => {
                        if !c.verify() {
                            failures.push("fd-claim: a recorded inequality fails".into());
                        }
                    }
                    Err(e) => failures.push(format!("fd-claim: unreadable: {e}")),
                },
                "walsh" => match serde_json::from_value::<WalshReport>(payload.clone()) {
                    Ok(r) => {
                        if !r.verify() {
                            failures.push("walsh: bounds or extremal records fail".into());
                        }
                    }
                    Err(e) => failures.push(format!("walsh: unreadable: {e}")),
                },
                "weak-convergence" => {
                    match serde_json::from_value::<WeakConvergenceCertificate>(payload.clone()) {
                        Ok(c) => {
                            if !c.verify() {
                                failures
                                    .push("weak-convergence: violation bound fails".into());
                            }
                        }
                        Err(e) => failures.push(format!("weak-convergence: unreadable: {e}")),
                    }
                }
                "oscillation" => {
                    match serde_json::from_value::<OscillationReport>(payload.clone()) {
                        Ok(r) => {
                            if !r.verify() {
                                failures.push("oscillation: a recorded bound fails".into());
                            }
                        }
                        Err(e) => failures.push(format!("oscillation: unreadable: {e}")),
                    }
                }
                other => failures.push(format!("unknown certificate kind {other:?}")),
            }
        }
    }
    failures
}
