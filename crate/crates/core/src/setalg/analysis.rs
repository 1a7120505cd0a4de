//! Exact per-column analysis of set expressions.
//!
//! For expressions built from finite sets, cofinite sets, and column
//! sets, the trace of the set on every column of the fixed pairing is
//! computable at once: finitely many irregular head columns carry
//! explicit position sets, and from some column on the position sets
//! repeat with a fixed period in the column index. The column filters
//! and the product filter decide membership and stationarity from this
//! description.

use super::ep::{BoolOp, EpSet};
use super::expr::{ColumnRule, ColumnSet, SetExpr};
use super::pairing::ColumnPartition;

const HEAD_CAP: usize = 1 << 14;
const TAIL_CAP: usize = 64;

/// Column `m ≤ head.len()` has position set `head[m-1]`; column
/// `m > head.len()` has position set `tail[(m - head.len() - 1) % tail.len()]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnAnalysis {
    pub head: Vec<EpSet>,
    pub tail: Vec<EpSet>,
}

impl ColumnAnalysis {
    pub fn column(&self, m: u64) -> &EpSet {
        let idx = (m - 1) as usize;
        if idx < self.head.len() {
            &self.head[idx]
        } else {
            &self.tail[(idx - self.head.len()) % self.tail.len()]
        }
    }

    pub fn complement(&self) -> ColumnAnalysis {
        ColumnAnalysis {
            head: self.head.iter().map(EpSet::complement).collect(),
            tail: self.tail.iter().map(EpSet::complement).collect(),
        }
    }

    pub fn binop(&self, other: &ColumnAnalysis, op: BoolOp) -> Option<ColumnAnalysis> {
        let head_len = self.head.len().max(other.head.len());
        let tail_len = lcm(self.tail.len(), other.tail.len());
        if head_len > HEAD_CAP || tail_len > TAIL_CAP {
            return None;
        }
        let mut head = Vec::with_capacity(head_len);
        for m in 1..=(head_len as u64) {
            head.push(self.column(m).binop(other.column(m), op)?);
        }
        let mut tail = Vec::with_capacity(tail_len);
        for j in 0..tail_len as u64 {
            let m = head_len as u64 + 1 + j;
            tail.push(self.column(m).binop(other.column(m), op)?);
        }
        Some(ColumnAnalysis { head, tail })
    }

    /// The set is infinite iff some head column is infinite or some
    /// tail class is non-empty (a non-empty class repeats over
    /// infinitely many columns).
    pub fn is_infinite(&self) -> bool {
        self.tail.iter().any(|c| !c.is_empty_set())
            || self.head.iter().any(|c| !c.is_finite())
    }

    pub fn is_empty(&self) -> bool {
        self.head.iter().all(|c| c.is_empty_set()) && self.tail.iter().all(|c| c.is_empty_set())
    }

    /// Columns (up to `limit`) whose position set is infinite.
    pub fn infinite_columns_upto(&self, limit: u64) -> Vec<u64> {
        (1..=limit)
            .filter(|&m| !self.column(m).is_finite())
            .collect()
    }

    /// Does every column from some index on have a cofinite position
    /// set? Returns the smallest such start when one exists
    /// (`Err(witness_class)` names an offending tail class otherwise).
    pub fn eventually_cofinite_columns(&self) -> Result<u64, u64> {
        for (j, class) in self.tail.iter().enumerate() {
            if !class.is_cofinite() {
                return Err(self.head.len() as u64 + 1 + j as u64);
            }
        }
        let mut from = self.head.len() as u64 + 1;
        for m in (1..=self.head.len() as u64).rev() {
            if self.column(m).is_cofinite() {
                from = m;
            } else {
                break;
            }
        }
        Ok(from)
    }

    /// Are infinitely many columns infinite? (`Ok(class_column)` gives
    /// a representative column of an infinite tail class.)
    pub fn infinitely_many_infinite_columns(&self) -> Option<u64> {
        self.tail
            .iter()
            .enumerate()
            .find(|(_, c)| !c.is_finite())
            .map(|(j, _)| self.head.len() as u64 + 1 + j as u64)
    }
}

/// Computes the per-column description, when the expression stays in
/// the supported fragment (finite, cofinite, and column-set leaves
/// under boolean operations). Expressions that normalize to a finite or
/// cofinite set are handled outright, whatever their shape.
pub fn column_analysis(expr: &SetExpr) -> Option<ColumnAnalysis> {
    if let Some(ep) = expr.normalize() {
        return if ep.is_finite() {
            Some(finite_analysis(ep.elems()?))
        } else if ep.is_cofinite() {
            let missing = ep.complement().elems()?;
            Some(finite_analysis(missing).complement())
        } else {
            // Periodic sets of positive density have no uniform
            // per-column description in this fragment.
            None
        };
    }
    match expr {
        SetExpr::Finite(vals) => Some(finite_analysis(vals.iter().copied())),
        SetExpr::Ep(_) | SetExpr::Ap { .. } => None,
        SetExpr::Columns(cs) => colset_analysis(cs),
        SetExpr::Selector { .. } => None,
        SetExpr::Compl(inner) => Some(column_analysis(inner)?.complement()),
        SetExpr::Union(parts) => {
            let mut acc = ColumnAnalysis {
                head: Vec::new(),
                tail: vec![EpSet::empty()],
            };
            for p in parts {
                acc = acc.binop(&column_analysis(p)?, BoolOp::Union)?;
            }
            Some(acc)
        }
        SetExpr::Inter(parts) => {
            let mut acc = ColumnAnalysis {
                head: Vec::new(),
                tail: vec![EpSet::all()],
            };
            for p in parts {
                acc = acc.binop(&column_analysis(p)?, BoolOp::Inter)?;
            }
            Some(acc)
        }
        SetExpr::Diff(a, b) => column_analysis(a)?.binop(&column_analysis(b)?, BoolOp::Diff),
    }
}

fn finite_analysis<I: IntoIterator<Item = u64>>(vals: I) -> ColumnAnalysis {
    let pairing = ColumnPartition;
    let mut per_col: Vec<(u64, u64)> = vals
        .into_iter()
        .filter(|&v| v >= 1)
        .map(|v| {
            let (pos, col) = pairing.pair_of(v);
            (col, pos)
        })
        .collect();
    per_col.sort_unstable();
    let head_len = per_col.last().map(|&(c, _)| c).unwrap_or(0) as usize;
    let mut head = vec![EpSet::empty(); head_len];
    let mut i = 0;
    while i < per_col.len() {
        let col = per_col[i].0;
        let mut positions = Vec::new();
        while i < per_col.len() && per_col[i].0 == col {
            positions.push(per_col[i].1);
            i += 1;
        }
        head[(col - 1) as usize] = EpSet::from_elems(positions);
    }
    ColumnAnalysis {
        head,
        tail: vec![EpSet::empty()],
    }
}

fn colset_analysis(cs: &ColumnSet) -> Option<ColumnAnalysis> {
    let pairing = ColumnPartition;
    // Beyond this column the value-based parts of the rules are
    // exhausted and participation is periodic.
    let max_value_col = |rule: &ColumnRule| -> u64 {
        match rule {
            ColumnRule::CofiniteValues(vals) | ColumnRule::FiniteValues(vals) => vals
                .iter()
                .map(|&v| pairing.column_of(v))
                .max()
                .unwrap_or(0),
            _ => 0,
        }
    };
    let sel_ep = cs.columns.as_epset();
    let mut head_len = sel_ep.prefix_len() as u64;
    head_len = head_len.max(max_value_col(&cs.rule));
    for (&col, rule) in &cs.overrides {
        head_len = head_len.max(col).max(max_value_col(rule));
    }
    if head_len as usize > HEAD_CAP || sel_ep.period_len() > TAIL_CAP {
        return None;
    }
    let head: Vec<EpSet> = (1..=head_len)
        .map(|m| cs.rule_in(m).positions_in(m))
        .collect();
    // Tail classes: participation repeats with the selector period and
    // the default rule is column-independent past the head.
    let tail_default = match &cs.rule {
        ColumnRule::CofiniteValues(_) => EpSet::all(),
        ColumnRule::FiniteValues(_) => EpSet::empty(),
        other => other.positions_in(u64::MAX),
    };
    let tail: Vec<EpSet> = (0..sel_ep.period_len() as u64)
        .map(|j| {
            let m = head_len + 1 + j;
            if sel_ep.member(m) {
                tail_default.clone()
            } else {
                EpSet::empty()
            }
        })
        .collect();
    Some(ColumnAnalysis { head, tail })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        return a.max(b).max(1);
    }
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setalg::expr::ColumnSelector;

    fn check_against_membership(expr: &SetExpr, analysis: &ColumnAnalysis, horizon: u64) {
        let pairing = ColumnPartition;
        for n in 1..=horizon {
            let (pos, col) = pairing.pair_of(n);
            assert_eq!(
                expr.member(n),
                analysis.column(col).member(pos),
                "n={n} (pos {pos}, col {col})"
            );
        }
    }

    #[test]
    fn finite_leaf_analysis() {
        let expr = SetExpr::finite([1, 2, 5, 17]);
        let a = column_analysis(&expr).unwrap();
        check_against_membership(&expr, &a, 3000);
        assert!(!a.is_infinite());
    }

    #[test]
    fn full_column_union_finite() {
        let expr = SetExpr::column(3).union(SetExpr::finite([1, 10]));
        let a = column_analysis(&expr).unwrap();
        check_against_membership(&expr, &a, 3000);
        assert!(a.is_infinite());
        assert_eq!(a.infinite_columns_upto(10), vec![3]);
    }

    #[test]
    fn complement_of_column_is_eventually_full() {
        let expr = SetExpr::column(2).compl();
        let a = column_analysis(&expr).unwrap();
        check_against_membership(&expr, &a, 3000);
        // Every column from 3 on is fully present.
        assert_eq!(a.eventually_cofinite_columns(), Ok(3));
    }

    #[test]
    fn tail_classes_respect_selector_period() {
        // Even-indexed columns, every second position.
        let cs = ColumnSet::new(
            ColumnSelector::Pattern(EpSet::from_ap(0, 2)),
            ColumnRule::Subsample { first: 1, step: 2 },
        );
        let expr = SetExpr::Columns(cs);
        let a = column_analysis(&expr).unwrap();
        check_against_membership(&expr, &a, 5000);
        assert!(a.is_infinite());
        assert!(a.infinitely_many_infinite_columns().is_some());
        assert!(a.eventually_cofinite_columns().is_err());
    }

    #[test]
    fn column_tail_set_is_eventually_cofinite() {
        // Columns ≥ 4, minus the first two positions of column 5.
        let cs = ColumnSet::new(ColumnSelector::From(4), ColumnRule::Full).with_override(
            5,
            ColumnRule::Positions(EpSet::from_tail(3)),
        );
        let expr = SetExpr::Columns(cs);
        let a = column_analysis(&expr).unwrap();
        check_against_membership(&expr, &a, 5000);
        assert_eq!(a.eventually_cofinite_columns(), Ok(4));
    }

    #[test]
    fn cofinite_value_leaf() {
        let expr = SetExpr::finite([3, 4]).compl();
        let a = column_analysis(&expr).unwrap();
        check_against_membership(&expr, &a, 2000);
        assert_eq!(a.eventually_cofinite_columns(), Ok(1));
    }
}
