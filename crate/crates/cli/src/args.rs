//! Shared argument decoding: names or JSON files for filters, sets,
//! blockings, sequences, and chains.

use std::path::Path;

use num_rational::BigRational;
use serde_json::Value;

use filterlab_core::filters::json::filter_from_json;
use filterlab_core::filters::witness::BaseChain;
use filterlab_core::filters::FilterHandle;
use filterlab_core::l1seq::{ScalarSeq, SeqGen};
use filterlab_core::ratio::parse_rational;
use filterlab_core::setalg::json::{blocking_from_json, setexpr_from_json};
use filterlab_core::setalg::{Blocking, SetExpr};

pub fn usage_error(msg: impl std::fmt::Display) -> ! {
    eprintln!("error: {msg}");
    std::process::exit(2);
}

fn load_json(path: &str) -> Value {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => usage_error(format!("cannot read {path}: {e}")),
    };
    match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => usage_error(format!(
            "malformed JSON in {path} at line {} column {}: {e}",
            e.line(),
            e.column()
        )),
    }
}

fn looks_like_file(spec: &str) -> bool {
    spec.ends_with(".json") || Path::new(spec).exists()
}

pub fn parse_filter(spec: &str) -> FilterHandle {
    match spec {
        "frechet" => return FilterHandle::Frechet,
        "statistical" => return FilterHandle::Statistical,
        "columnFD" => return FilterHandle::ColumnFdTail,
        "columnFd" => return FilterHandle::ColumnFdEvery,
        "tails" | "countableBase" => return FilterHandle::countable_tails(),
        _ => {}
    }
    if looks_like_file(spec) {
        match filter_from_json(&load_json(spec)) {
            Ok(f) => f,
            Err(e) => usage_error(e),
        }
    } else {
        usage_error(format!(
            "unknown filter {spec:?} (names: frechet, statistical, columnFD, columnFd, tails; or a JSON file)"
        ))
    }
}

pub fn parse_set(spec: &str) -> SetExpr {
    match spec {
        "naturals" => return SetExpr::naturals(),
        "evens" => return SetExpr::evens(),
        "odds" => return SetExpr::odds(),
        _ => {}
    }
    if let Some(rest) = spec.strip_prefix("column:") {
        match rest.parse::<u64>() {
            Ok(m) if m >= 1 => return SetExpr::column(m),
            _ => usage_error(format!("bad column index in {spec:?}")),
        }
    }
    if looks_like_file(spec) {
        match setexpr_from_json(&load_json(spec)) {
            Ok(s) => s,
            Err(e) => usage_error(e),
        }
    } else {
        usage_error(format!(
            "unknown set {spec:?} (names: naturals, evens, odds, column:<m>; or a JSON file)"
        ))
    }
}

pub fn parse_blocking(spec: &str) -> Blocking {
    if spec == "dyadic" {
        return Blocking::Dyadic;
    }
    if let Some(rest) = spec.strip_prefix("explicit:") {
        let boundaries: Result<Vec<u64>, _> = rest.split(',').map(str::parse).collect();
        match boundaries.map(Blocking::explicit) {
            Ok(Ok(b)) => return b,
            _ => usage_error(format!("bad explicit boundaries in {spec:?}")),
        }
    }
    if looks_like_file(spec) {
        match blocking_from_json(&load_json(spec)) {
            Ok(b) => b,
            Err(e) => usage_error(e),
        }
    } else {
        usage_error(format!(
            "unknown blocking {spec:?} (names: dyadic, explicit:a,b,c; or a JSON file)"
        ))
    }
}

pub fn parse_vector_seq(spec: &str) -> SeqGen {
    match filterlab_core::cert::named_sequence(spec) {
        Some(s) => s,
        None => usage_error(format!(
            "unknown sequence {spec:?} (names: canonical, remark, perturbed, injective, injective-plus)"
        )),
    }
}

pub fn parse_scalar_seq(spec: &str) -> ScalarSeq {
    match spec {
        "reciprocal" => ScalarSeq::reciprocal(),
        "alternating" => ScalarSeq::alternating_sign(),
        "squares" => ScalarSeq::square_indicator(),
        "linear" => ScalarSeq::linear(),
        _ => {
            if let Some(rest) = spec.strip_prefix("const:") {
                match parse_rational(rest) {
                    Some(v) => ScalarSeq::constant(v),
                    None => usage_error(format!("bad rational in {spec:?}")),
                }
            } else {
                usage_error(format!(
                    "unknown scalar sequence {spec:?} (names: reciprocal, alternating, squares, linear, const:p/q)"
                ))
            }
        }
    }
}

pub fn parse_chain(spec: &str) -> BaseChain {
    if spec == "column-tails" {
        return BaseChain::ColumnTails;
    }
    if let Some(rest) = spec.strip_prefix("tails") {
        let step = rest
            .strip_prefix(':')
            .map(|s| s.parse::<u64>().unwrap_or(0))
            .unwrap_or(1);
        if step >= 1 {
            return BaseChain::Tails { step };
        }
    }
    if let Some(rest) = spec.strip_prefix("column-shrink") {
        let step = rest
            .strip_prefix(':')
            .map(|s| s.parse::<u64>().unwrap_or(0))
            .unwrap_or(1);
        if step >= 1 {
            return BaseChain::ColumnShrink { step };
        }
    }
    usage_error(format!(
        "unknown chain {spec:?} (names: tails[:step], column-tails, column-shrink[:step])"
    ))
}

pub fn parse_epsilon(spec: &str) -> BigRational {
    use num_traits::Zero;
    match parse_rational(spec) {
        Some(e) if e > BigRational::zero() => e,
        _ => usage_error(format!("--epsilon needs a positive rational, got {spec:?}")),
    }
}

/// Applies the environment cap on sweep horizons.
pub fn capped_horizon(requested: u64) -> u64 {
    match std::env::var("FILTERLAB_MAX_HORIZON")
        .ok()
        .and_then(|v| v.parse::<u64>().ok())
    {
        Some(cap) if cap >= 16 => requested.min(cap),
        _ => requested,
    }
}
