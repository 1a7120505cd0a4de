//! JSON encodings for set expressions and blockings.
//!
//! Expressions: `{"op": "union"|"inter"|"diff"|"compl", "args": [...]}`
//! over generator leaves `{"gen": "ap"|"ep"|"finite"|"colset"|"selector", ...}`.
//! Round-trip stable: decoding the encoding yields a structurally equal
//! expression.

use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

use super::blocking::{Blocking, Choice};
use super::ep::EpSet;
use super::expr::{ColumnRule, ColumnSelector, ColumnSet, SetExpr};
use crate::error::FilterlabError;

fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn string_to_bits(s: &str) -> Result<Vec<bool>, FilterlabError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(FilterlabError::Malformed(format!(
                "bit word may contain only 0/1, found {other:?}"
            ))),
        })
        .collect()
}

pub fn epset_to_json(ep: &EpSet) -> Value {
    json!({
        "prefix": bits_to_string(ep.prefix_word()),
        "period": bits_to_string(ep.period_word()),
    })
}

pub fn epset_from_json(v: &Value) -> Result<EpSet, FilterlabError> {
    let prefix = string_to_bits(str_field(v, "prefix")?)?;
    let period = string_to_bits(str_field(v, "period")?)?;
    if period.is_empty() {
        return Err(FilterlabError::Malformed("period word must be non-empty".into()));
    }
    Ok(EpSet::new(prefix, period))
}

pub fn setexpr_to_json(expr: &SetExpr) -> Value {
    match expr {
        SetExpr::Finite(elems) => json!({
            "gen": "finite",
            "elems": elems.iter().collect::<Vec<_>>(),
        }),
        SetExpr::Ap { first, step } => json!({ "gen": "ap", "first": first, "step": step }),
        SetExpr::Ep(ep) => {
            let mut m = Map::new();
            m.insert("gen".into(), json!("ep"));
            m.insert("prefix".into(), json!(bits_to_string(ep.prefix_word())));
            m.insert("period".into(), json!(bits_to_string(ep.period_word())));
            Value::Object(m)
        }
        SetExpr::Columns(cs) => {
            let overrides: Map<String, Value> = cs
                .overrides
                .iter()
                .map(|(col, rule)| (col.to_string(), rule_to_json(rule)))
                .collect();
            json!({
                "gen": "colset",
                "columns": colsel_to_json(&cs.columns),
                "rule": rule_to_json(&cs.rule),
                "overrides": overrides,
            })
        }
        SetExpr::Selector { blocking, choice } => json!({
            "gen": "selector",
            "blocking": blocking_to_json(blocking),
            "choice": match choice { Choice::Min => "min", Choice::Max => "max" },
        }),
        SetExpr::Compl(inner) => json!({ "op": "compl", "args": [setexpr_to_json(inner)] }),
        SetExpr::Union(parts) => json!({
            "op": "union",
            "args": parts.iter().map(setexpr_to_json).collect::<Vec<_>>(),
        }),
        SetExpr::Inter(parts) => json!({
            "op": "inter",
            "args": parts.iter().map(setexpr_to_json).collect::<Vec<_>>(),
        }),
        SetExpr::Diff(a, b) => json!({
            "op": "diff",
            "args": [setexpr_to_json(a), setexpr_to_json(b)],
        }),
    }
}

pub fn setexpr_from_json(v: &Value) -> Result<SetExpr, FilterlabError> {
    let obj = v
        .as_object()
        .ok_or_else(|| FilterlabError::Malformed("set expression must be an object".into()))?;
    if let Some(op) = obj.get("op") {
        let op = op
            .as_str()
            .ok_or_else(|| FilterlabError::Malformed("op must be a string".into()))?;
        let args: Vec<SetExpr> = obj
            .get("args")
            .and_then(Value::as_array)
            .ok_or_else(|| FilterlabError::Malformed(format!("op {op:?} needs an args array")))?
            .iter()
            .map(setexpr_from_json)
            .collect::<Result<_, _>>()?;
        return match (op, args.len()) {
            ("compl", 1) => Ok(SetExpr::Compl(Box::new(args.into_iter().next().unwrap()))),
            ("union", _) => Ok(SetExpr::Union(args)),
            ("inter", _) => Ok(SetExpr::Inter(args)),
            ("diff", 2) => {
                let mut it = args.into_iter();
                Ok(SetExpr::Diff(
                    Box::new(it.next().unwrap()),
                    Box::new(it.next().unwrap()),
                ))
            }
            (op, n) => Err(FilterlabError::Malformed(format!(
                "op {op:?} does not take {n} arguments"
            ))),
        };
    }
    match obj.get("gen").and_then(Value::as_str) {
        Some("finite") => Ok(SetExpr::finite(u64_list(v, "elems")?)),
        Some("ap") => Ok(SetExpr::Ap {
            first: u64_field(v, "first")?,
            step: {
                let s = u64_field(v, "step")?;
                if s == 0 {
                    return Err(FilterlabError::Malformed("ap step must be positive".into()));
                }
                s
            },
        }),
        Some("ep") => Ok(SetExpr::Ep(epset_from_json(v)?)),
        Some("colset") => {
            let columns = colsel_from_json(obj.get("columns").ok_or_else(|| {
                FilterlabError::Malformed("colset needs a columns field".into())
            })?)?;
            let rule = rule_from_json(
                obj.get("rule")
                    .ok_or_else(|| FilterlabError::Malformed("colset needs a rule field".into()))?,
            )?;
            let mut overrides = BTreeMap::new();
            if let Some(ov) = obj.get("overrides") {
                let map = ov.as_object().ok_or_else(|| {
                    FilterlabError::Malformed("overrides must be an object".into())
                })?;
                for (k, rv) in map {
                    let col: u64 = k.parse().map_err(|_| {
                        FilterlabError::Malformed(format!("override key {k:?} is not a column index"))
                    })?;
                    overrides.insert(col, rule_from_json(rv)?);
                }
            }
            Ok(SetExpr::Columns(ColumnSet {
                columns,
                rule,
                overrides,
            }))
        }
        Some("selector") => {
            let blocking = blocking_from_json(obj.get("blocking").ok_or_else(|| {
                FilterlabError::Malformed("selector needs a blocking field".into())
            })?)?;
            let choice = match obj.get("choice").and_then(Value::as_str) {
                Some("min") | None => Choice::Min,
                Some("max") => Choice::Max,
                Some(other) => {
                    return Err(FilterlabError::Malformed(format!(
                        "unknown choice rule {other:?}"
                    )))
                }
            };
            Ok(SetExpr::Selector {
                blocking: Box::new(blocking),
                choice,
            })
        }
        Some(other) => Err(FilterlabError::Malformed(format!(
            "unknown generator {other:?}"
        ))),
        None => Err(FilterlabError::Malformed(
            "set expression needs an op or gen field".into(),
        )),
    }
}

fn colsel_to_json(sel: &ColumnSelector) -> Value {
    match sel {
        ColumnSelector::All => json!("all"),
        ColumnSelector::From(m) => json!({ "from": m }),
        ColumnSelector::Pattern(ep) => json!({ "pattern": epset_to_json(ep) }),
        ColumnSelector::Finite(s) => json!({ "finite": s.iter().collect::<Vec<_>>() }),
    }
}

fn colsel_from_json(v: &Value) -> Result<ColumnSelector, FilterlabError> {
    if v.as_str() == Some("all") {
        return Ok(ColumnSelector::All);
    }
    let obj = v
        .as_object()
        .ok_or_else(|| FilterlabError::Malformed("columns must be \"all\" or an object".into()))?;
    if let Some(m) = obj.get("from") {
        return Ok(ColumnSelector::From(as_u64(m, "from")?));
    }
    if let Some(p) = obj.get("pattern") {
        return Ok(ColumnSelector::Pattern(epset_from_json(p)?));
    }
    if let Some(f) = obj.get("finite") {
        let elems = f
            .as_array()
            .ok_or_else(|| FilterlabError::Malformed("finite columns must be an array".into()))?
            .iter()
            .map(|e| as_u64(e, "finite column"))
            .collect::<Result<_, _>>()?;
        return Ok(ColumnSelector::Finite(elems));
    }
    Err(FilterlabError::Malformed(
        "columns must be all / from / pattern / finite".into(),
    ))
}

fn rule_to_json(rule: &ColumnRule) -> Value {
    match rule {
        ColumnRule::Empty => json!({ "rule": "empty" }),
        ColumnRule::Full => json!({ "rule": "full" }),
        ColumnRule::CofiniteValues(ex) => json!({
            "rule": "cofinite",
            "except": ex.iter().collect::<Vec<_>>(),
        }),
        ColumnRule::FiniteValues(elems) => json!({
            "rule": "finite",
            "elems": elems.iter().collect::<Vec<_>>(),
        }),
        ColumnRule::Subsample { first, step } => {
            json!({ "rule": "subsample", "first": first, "step": step })
        }
        ColumnRule::Positions(ep) => json!({
            "rule": "positions",
            "prefix": bits_to_string(ep.prefix_word()),
            "period": bits_to_string(ep.period_word()),
        }),
    }
}

fn rule_from_json(v: &Value) -> Result<ColumnRule, FilterlabError> {
    match v.get("rule").and_then(Value::as_str) {
        Some("empty") => Ok(ColumnRule::Empty),
        Some("full") => Ok(ColumnRule::Full),
        Some("cofinite") => Ok(ColumnRule::CofiniteValues(
            u64_list(v, "except")?.into_iter().collect(),
        )),
        Some("finite") => Ok(ColumnRule::FiniteValues(
            u64_list(v, "elems")?.into_iter().collect(),
        )),
        Some("subsample") => {
            let first = u64_field(v, "first")?;
            let step = u64_field(v, "step")?;
            if first == 0 || step == 0 {
                return Err(FilterlabError::Malformed(
                    "subsample first and step must be positive".into(),
                ));
            }
            Ok(ColumnRule::Subsample { first, step })
        }
        Some("positions") => Ok(ColumnRule::Positions(epset_from_json(v)?)),
        other => Err(FilterlabError::Malformed(format!(
            "unknown column rule {other:?}"
        ))),
    }
}

pub fn blocking_to_json(b: &Blocking) -> Value {
    match b {
        Blocking::Dyadic => json!({ "blocking": "dyadic" }),
        Blocking::Explicit { boundaries } => {
            json!({ "blocking": "explicit", "boundaries": boundaries })
        }
        Blocking::Derived { ground, cuts } => json!({
            "blocking": "derived",
            "ground": setexpr_to_json(ground),
            "cuts": cuts,
        }),
        Blocking::DerivedDyadic { ground } => json!({
            "blocking": "derived-dyadic",
            "ground": setexpr_to_json(ground),
        }),
    }
}

pub fn blocking_from_json(v: &Value) -> Result<Blocking, FilterlabError> {
    let b = match v.get("blocking").and_then(Value::as_str) {
        Some("dyadic") => Blocking::Dyadic,
        Some("explicit") => Blocking::Explicit {
            boundaries: u64_list(v, "boundaries")?,
        },
        Some("derived") => Blocking::Derived {
            ground: Box::new(setexpr_from_json(v.get("ground").ok_or_else(|| {
                FilterlabError::Malformed("derived blocking needs a ground set".into())
            })?)?),
            cuts: u64_list(v, "cuts")?,
        },
        Some("derived-dyadic") => Blocking::DerivedDyadic {
            ground: Box::new(setexpr_from_json(v.get("ground").ok_or_else(|| {
                FilterlabError::Malformed("derived blocking needs a ground set".into())
            })?)?),
        },
        other => {
            return Err(FilterlabError::Malformed(format!(
                "unknown blocking {other:?}"
            )))
        }
    };
    b.validate()?;
    Ok(b)
}

impl serde::Serialize for SetExpr {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        setexpr_to_json(self).serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for SetExpr {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        setexpr_from_json(&v).map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for Blocking {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        blocking_to_json(self).serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for Blocking {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        blocking_from_json(&v).map_err(serde::de::Error::custom)
    }
}

fn str_field<'a>(v: &'a Value, key: &str) -> Result<&'a str, FilterlabError> {
    v.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| FilterlabError::Malformed(format!("missing string field {key:?}")))
}

fn as_u64(v: &Value, what: &str) -> Result<u64, FilterlabError> {
    v.as_u64()
        .ok_or_else(|| FilterlabError::Malformed(format!("{what} must be a natural number")))
}

fn u64_field(v: &Value, key: &str) -> Result<u64, FilterlabError> {
    as_u64(
        v.get(key)
            .ok_or_else(|| FilterlabError::Malformed(format!("missing field {key:?}")))?,
        key,
    )
}

fn u64_list(v: &Value, key: &str) -> Result<Vec<u64>, FilterlabError> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| FilterlabError::Malformed(format!("missing array field {key:?}")))?
        .iter()
        .map(|e| as_u64(e, key))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setalg::expr::ColumnSelector;

    #[test]
    fn expression_round_trip() {
        let exprs = vec![
            SetExpr::ap(0, 2),
            SetExpr::finite([1, 5, 9]),
            SetExpr::Ep(EpSet::new(vec![false, true], vec![true, false, false])),
            SetExpr::evens().union(SetExpr::odds()).compl(),
            SetExpr::Columns(
                ColumnSet::new(ColumnSelector::From(3), ColumnRule::Full).with_override(
                    5,
                    ColumnRule::Subsample { first: 2, step: 3 },
                ),
            ),
            SetExpr::Selector {
                blocking: Box::new(Blocking::Dyadic),
                choice: Choice::Min,
            },
            SetExpr::ap(1, 3).diff(SetExpr::finite([4])),
        ];
        for e in exprs {
            let v = setexpr_to_json(&e);
            let back = setexpr_from_json(&v).unwrap();
            assert_eq!(back, e);
            // And the encoding itself is stable.
            assert_eq!(setexpr_to_json(&back), v);
        }
    }

    #[test]
    fn malformed_inputs_error() {
        for bad in [
            json!({"gen": "ap", "first": 1}),
            json!({"gen": "ep", "prefix": "012", "period": "1"}),
            json!({"op": "diff", "args": [{"gen": "ap", "first": 1, "step": 1}]}),
            json!({"gen": "mystery"}),
            json!(42),
        ] {
            assert!(setexpr_from_json(&bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn blocking_round_trip_validates() {
        let b = Blocking::derived(SetExpr::evens(), vec![4, 16]).unwrap();
        let v = blocking_to_json(&b);
        assert_eq!(blocking_from_json(&v).unwrap(), b);
        assert!(blocking_from_json(&json!({"blocking": "explicit", "boundaries": [5, 5]})).is_err());
    }
}
