//! JSON encoding of filter definitions:
//! `{"kind": "frechet" | "statistical" | "columnFD" | "columnFd"
//!   | "countableBase" | "trace" | "sum" | "product", ...}`.

use serde_json::{json, Value};

use super::{BaseSpec, FilterHandle};
use crate::error::FilterlabError;
use crate::setalg::json::{setexpr_from_json, setexpr_to_json};

pub fn filter_to_json(f: &FilterHandle) -> Value {
    match f {
        FilterHandle::Frechet => json!({ "kind": "frechet" }),
        FilterHandle::Statistical => json!({ "kind": "statistical" }),
        FilterHandle::ColumnFdTail => {
            json!({ "kind": "columnFD", "pairing": "cantor-diagonal" })
        }
        FilterHandle::ColumnFdEvery => {
            json!({ "kind": "columnFd", "pairing": "cantor-diagonal" })
        }
        FilterHandle::CountableBase { base } => match base {
            BaseSpec::Tails => json!({ "kind": "countableBase", "base": "tails" }),
            BaseSpec::Explicit(sets) => json!({
                "kind": "countableBase",
                "base": sets.iter().map(setexpr_to_json).collect::<Vec<_>>(),
            }),
        },
        FilterHandle::Trace { parent, within } => json!({
            "kind": "trace",
            "parent": filter_to_json(parent),
            "I": setexpr_to_json(within),
        }),
        FilterHandle::Sum {
            left,
            left_ground,
            right,
            right_ground,
        } => json!({
            "kind": "sum",
            "left": filter_to_json(left),
            "leftGround": setexpr_to_json(left_ground),
            "right": filter_to_json(right),
            "rightGround": setexpr_to_json(right_ground),
        }),
        FilterHandle::Product { rows, cols } => json!({
            "kind": "product",
            "rows": filter_to_json(rows),
            "cols": filter_to_json(cols),
        }),
    }
}

pub fn filter_from_json(v: &Value) -> Result<FilterHandle, FilterlabError> {
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| FilterlabError::Malformed("filter needs a kind field".into()))?;
    let check_pairing = || -> Result<(), FilterlabError> {
        match v.get("pairing").and_then(Value::as_str) {
            None | Some("cantor-diagonal") => Ok(()),
            Some(other) => Err(FilterlabError::Malformed(format!(
                "unsupported pairing {other:?}"
            ))),
        }
    };
    match kind {
        "frechet" => Ok(FilterHandle::Frechet),
        "statistical" => Ok(FilterHandle::Statistical),
        "columnFD" => {
            check_pairing()?;
            Ok(FilterHandle::ColumnFdTail)
        }
        "columnFd" => {
            check_pairing()?;
            Ok(FilterHandle::ColumnFdEvery)
        }
        "countableBase" => {
            let base = v
                .get("base")
                .ok_or_else(|| FilterlabError::Malformed("countableBase needs a base".into()))?;
            if base.as_str() == Some("tails") {
                return Ok(FilterHandle::countable_tails());
            }
            let sets = base
                .as_array()
                .ok_or_else(|| {
                    FilterlabError::Malformed("base must be \"tails\" or a set list".into())
                })?
                .iter()
                .map(setexpr_from_json)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(FilterHandle::CountableBase {
                base: BaseSpec::Explicit(sets),
            })
        }
        "trace" => {
            let parent = filter_from_json(v.get("parent").ok_or_else(|| {
                FilterlabError::Malformed("trace needs a parent filter".into())
            })?)?;
            let within = setexpr_from_json(
                v.get("I")
                    .ok_or_else(|| FilterlabError::Malformed("trace needs an I set".into()))?,
            )?;
            // Construction-time stationarity precondition.
            parent.trace(within, 1 << 12)
        }
        "sum" => {
            let get = |key: &str| {
                v.get(key)
                    .ok_or_else(|| FilterlabError::Malformed(format!("sum needs field {key:?}")))
            };
            FilterHandle::sum(
                filter_from_json(get("left")?)?,
                setexpr_from_json(get("leftGround")?)?,
                filter_from_json(get("right")?)?,
                setexpr_from_json(get("rightGround")?)?,
            )
        }
        "product" => {
            let get = |key: &str| {
                v.get(key).ok_or_else(|| {
                    FilterlabError::Malformed(format!("product needs field {key:?}"))
                })
            };
            Ok(FilterHandle::product(
                filter_from_json(get("rows")?)?,
                filter_from_json(get("cols")?)?,
            ))
        }
        other => Err(FilterlabError::Malformed(format!(
            "unknown filter kind {other:?}"
        ))),
    }
}

impl serde::Serialize for FilterHandle {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        filter_to_json(self).serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for FilterHandle {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        filter_from_json(&v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setalg::SetExpr;

    #[test]
    fn filter_round_trip() {
        let filters = vec![
            FilterHandle::Frechet,
            FilterHandle::Statistical,
            FilterHandle::ColumnFdTail,
            FilterHandle::ColumnFdEvery,
            FilterHandle::countable_tails(),
            FilterHandle::Frechet.trace(SetExpr::evens(), 256).unwrap(),
            FilterHandle::sum(
                FilterHandle::Frechet,
                SetExpr::odds(),
                FilterHandle::Statistical,
                SetExpr::evens(),
            )
            .unwrap(),
            FilterHandle::product(FilterHandle::Frechet, FilterHandle::Frechet),
        ];
        for f in filters {
            let v = filter_to_json(&f);
            assert_eq!(filter_from_json(&v).unwrap(), f, "{v}");
        }
    }

    #[test]
    fn malformed_filters_rejected() {
        for bad in [
            serde_json::json!({"kind": "ultra"}),
            serde_json::json!({"kind": "columnFD", "pairing": "rowmajor"}),
            serde_json::json!({"kind": "trace", "parent": {"kind": "frechet"}}),
            serde_json::json!({}),
        ] {
            assert!(filter_from_json(&bad).is_err(), "{bad}");
        }
    }
}
