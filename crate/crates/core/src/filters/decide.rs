//! Structural helpers behind the decision procedures: certified
//! sublinear counting bounds (hence density zero) and reassembly of a
//! column analysis into an expression.

use crate::setalg::{
    column_analysis, ColumnAnalysis, ColumnRule, ColumnSelector, ColumnSet, EpSet, SetExpr,
};

/// A certified counting bound `|S ∩ [1,n]| ≤ bound(n)` with `bound`
/// sublinear, which forces natural density zero.
#[derive(Debug, Clone, PartialEq)]
pub enum ZeroBound {
    /// Finite set of at most this many elements.
    Finite(u64),
    /// Unit selector over a dyadic-type blocking: at most one point
    /// per piece, and at most `log2(n) + 2` pieces meet `[1, n]`.
    LogSelector,
    /// Subset of `k` columns of the pairing: each column has at most
    /// `isqrt(2n) + 1` elements in `[1, n]`.
    FewColumns(u64),
    /// Union of certified-zero parts.
    Sum(Vec<ZeroBound>),
}

impl ZeroBound {
    pub fn value(&self, n: u64) -> u64 {
        match self {
            ZeroBound::Finite(k) => *k,
            ZeroBound::LogSelector => n.max(1).ilog2() as u64 + 2,
            ZeroBound::FewColumns(k) => k * (isqrt(2 * n) + 1),
            ZeroBound::Sum(parts) => parts.iter().map(|p| p.value(n)).sum(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ZeroBound::Finite(k) => format!("|S| <= {k}"),
            ZeroBound::LogSelector => "count(n) <= log2(n) + 2 (unit selector, dyadic pieces)".into(),
            ZeroBound::FewColumns(k) => {
                format!("count(n) <= {k}*(isqrt(2n)+1) (subset of {k} columns)")
            }
            ZeroBound::Sum(parts) => {
                let inner: Vec<String> = parts.iter().map(|p| p.describe()).collect();
                format!("sum of [{}]", inner.join("; "))
            }
        }
    }
}

fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Rewrites `ℕ \ set` with complements pushed to the leaves, so the
/// structural analyses can see through negations of compound sets.
pub fn push_complement(set: &SetExpr) -> SetExpr {
    match set {
        SetExpr::Compl(inner) => (**inner).clone(),
        SetExpr::Union(parts) => SetExpr::Inter(parts.iter().map(push_complement).collect()),
        SetExpr::Inter(parts) => SetExpr::Union(parts.iter().map(push_complement).collect()),
        SetExpr::Diff(a, b) => push_complement(a).union((**b).clone()),
        leaf => leaf.clone().compl(),
    }
}

/// Certifies that a set has natural density zero, structurally.
/// Sound but deliberately incomplete: `None` means "no certificate",
/// not "positive density".
pub fn certified_zero(set: &SetExpr) -> Option<ZeroBound> {
    if let Some(ep) = set.normalize() {
        return if ep.is_finite() {
            let max = ep.max_elem().unwrap_or(0);
            Some(ZeroBound::Finite(ep.count(max)))
        } else {
            // Infinite eventually periodic sets have positive density.
            None
        };
    }
    match set {
        SetExpr::Compl(inner) => {
            // ℕ \ inner with the negation distributed; stop when the
            // rewrite makes no progress (negated leaf).
            if matches!(**inner, SetExpr::Compl(_))
                || matches!(
                    **inner,
                    SetExpr::Union(_) | SetExpr::Inter(_) | SetExpr::Diff(_, _)
                )
            {
                certified_zero(&push_complement(inner))
            } else {
                None
            }
        }
        SetExpr::Selector { blocking, .. } if blocking.log_piece_growth() => {
            Some(ZeroBound::LogSelector)
        }
        SetExpr::Columns(_) => {
            let analysis = column_analysis(set)?;
            if analysis.tail.iter().all(|c| c.is_empty_set()) {
                let cols = analysis
                    .head
                    .iter()
                    .filter(|c| !c.is_empty_set())
                    .count() as u64;
                Some(ZeroBound::FewColumns(cols))
            } else {
                None
            }
        }
        SetExpr::Union(parts) => {
            let bounds: Option<Vec<ZeroBound>> = parts.iter().map(certified_zero).collect();
            Some(ZeroBound::Sum(bounds?))
        }
        SetExpr::Inter(parts) => parts.iter().find_map(certified_zero),
        SetExpr::Diff(a, _) => certified_zero(a),
        _ => None,
    }
}

/// Rebuilds an expression whose membership agrees with the analysis.
pub fn analysis_to_expr(analysis: &ColumnAnalysis) -> SetExpr {
    let mut parts: Vec<SetExpr> = Vec::new();
    let head_overrides: std::collections::BTreeMap<u64, ColumnRule> = analysis
        .head
        .iter()
        .enumerate()
        .filter(|(_, ep)| !ep.is_empty_set())
        .map(|(i, ep)| (i as u64 + 1, ColumnRule::Positions(ep.clone())))
        .collect();
    if !head_overrides.is_empty() {
        parts.push(SetExpr::Columns(ColumnSet {
            columns: ColumnSelector::Finite(Default::default()),
            rule: ColumnRule::Empty,
            overrides: head_overrides,
        }));
    }
    let head_len = analysis.head.len() as u64;
    let tail_len = analysis.tail.len() as u64;
    for (j, class) in analysis.tail.iter().enumerate() {
        if class.is_empty_set() {
            continue;
        }
        parts.push(SetExpr::Columns(ColumnSet::new(
            ColumnSelector::Pattern(EpSet::from_ap(head_len + 1 + j as u64, tail_len)),
            ColumnRule::Positions(class.clone()),
        )));
    }
    match parts.len() {
        0 => SetExpr::empty(),
        1 => parts.pop().unwrap(),
        _ => SetExpr::Union(parts),
    }
}
