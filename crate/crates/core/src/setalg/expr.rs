//! Finitely-describable subsets of ℕ: generator leaves closed under
//! the boolean operations, with exact membership and counting.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use super::blocking::{Blocking, Choice};
use super::ep::{BoolOp, EpSet};
use super::pairing::ColumnPartition;

/// Expression tree over the generator leaves. Indices start at 1, so
/// ℕ = {1, 2, ...}; an arithmetic progression with `first = 0` simply
/// contributes its positive members.
#[derive(Debug, Clone, PartialEq)]
pub enum SetExpr {
    /// Explicit finite set.
    Finite(BTreeSet<u64>),
    /// `{first, first+step, first+2·step, ...} ∩ ℕ`.
    Ap { first: u64, step: u64 },
    /// Eventually periodic membership word.
    Ep(EpSet),
    /// Column-structured set over the fixed diagonal pairing.
    Columns(ColumnSet),
    /// One chosen element per piece of a blocking.
    Selector { blocking: Box<Blocking>, choice: Choice },
    Compl(Box<SetExpr>),
    Union(Vec<SetExpr>),
    Inter(Vec<SetExpr>),
    Diff(Box<SetExpr>, Box<SetExpr>),
}

/// Per-column rule of a [`ColumnSet`].
///
/// Value-based rules (`CofiniteValues`, `FiniteValues`) hold actual
/// elements of ℕ and act on whichever column each value lives in;
/// position-based rules act on the 1-based enumeration of a column.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnRule {
    Empty,
    Full,
    /// The column minus the listed values.
    CofiniteValues(BTreeSet<u64>),
    /// Exactly the listed values (those lying in the column).
    FiniteValues(BTreeSet<u64>),
    /// Positions `first, first+step, ...` of the column enumeration.
    Subsample { first: u64, step: u64 },
    /// Arbitrary eventually periodic position pattern; the closure of
    /// subsampling needed so that stationary splits stay expressible.
    Positions(EpSet),
}

impl ColumnRule {
    /// The exact position set this rule selects within column `col`.
    pub fn positions_in(&self, col: u64) -> EpSet {
        let pairing = ColumnPartition;
        match self {
            ColumnRule::Empty => EpSet::empty(),
            ColumnRule::Full => EpSet::all(),
            ColumnRule::CofiniteValues(vals) => {
                let removed: Vec<u64> = vals
                    .iter()
                    .filter(|&&v| pairing.column_of(v) == col)
                    .map(|&v| pairing.position_of(v))
                    .collect();
                EpSet::all()
                    .binop(&EpSet::from_elems(removed), BoolOp::Diff)
                    .expect("finite alignment")
            }
            ColumnRule::FiniteValues(vals) => EpSet::from_elems(
                vals.iter()
                    .filter(|&&v| pairing.column_of(v) == col)
                    .map(|&v| pairing.position_of(v)),
            ),
            ColumnRule::Subsample { first, step } => EpSet::from_ap(*first, *step),
            ColumnRule::Positions(ep) => ep.clone(),
        }
    }

    pub fn is_full(&self) -> bool {
        matches!(self, ColumnRule::Full)
    }
}

/// Which columns a [`ColumnSet`] touches.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnSelector {
    All,
    /// Columns `m, m+1, ...`.
    From(u64),
    /// Eventually periodic set of column indices.
    Pattern(EpSet),
    Finite(BTreeSet<u64>),
}

impl ColumnSelector {
    pub fn contains(&self, col: u64) -> bool {
        match self {
            ColumnSelector::All => true,
            ColumnSelector::From(m) => col >= *m,
            ColumnSelector::Pattern(ep) => ep.member(col),
            ColumnSelector::Finite(s) => s.contains(&col),
        }
    }

    /// Column-index set as an [`EpSet`] when it is one.
    pub fn as_epset(&self) -> EpSet {
        match self {
            ColumnSelector::All => EpSet::all(),
            ColumnSelector::From(m) => EpSet::from_tail(*m),
            ColumnSelector::Pattern(ep) => ep.clone(),
            ColumnSelector::Finite(s) => EpSet::from_elems(s.iter().copied()),
        }
    }
}

/// A set assembled column by column: each participating column
/// contributes the part of itself selected by its rule.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSet {
    pub columns: ColumnSelector,
    pub rule: ColumnRule,
    pub overrides: BTreeMap<u64, ColumnRule>,
}

impl ColumnSet {
    pub fn new(columns: ColumnSelector, rule: ColumnRule) -> Self {
        ColumnSet {
            columns,
            rule,
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_override(mut self, col: u64, rule: ColumnRule) -> Self {
        self.overrides.insert(col, rule);
        self
    }

    /// The rule effective in column `col`.
    pub fn rule_in(&self, col: u64) -> &ColumnRule {
        if let Some(r) = self.overrides.get(&col) {
            r
        } else if self.columns.contains(col) {
            &self.rule
        } else {
            &ColumnRule::Empty
        }
    }

    pub fn member(&self, n: u64) -> bool {
        let pairing = ColumnPartition;
        let (pos, col) = pairing.pair_of(n);
        match self.rule_in(col) {
            ColumnRule::Empty => false,
            ColumnRule::Full => true,
            ColumnRule::CofiniteValues(vals) => !vals.contains(&n),
            ColumnRule::FiniteValues(vals) => vals.contains(&n),
            ColumnRule::Subsample { first, step } => {
                pos >= *first && (pos - *first) % *step == 0
            }
            ColumnRule::Positions(ep) => ep.member(pos),
        }
    }

    fn count(&self, n: u64) -> u64 {
        let pairing = ColumnPartition;
        let mut total = 0;
        for col in 1..=pairing.columns_touched_upto(n) {
            let kmax = pairing.column_count_upto(col, n);
            if kmax == 0 {
                continue;
            }
            total += match self.rule_in(col) {
                ColumnRule::Empty => 0,
                ColumnRule::Full => kmax,
                ColumnRule::CofiniteValues(vals) => {
                    let removed = vals
                        .iter()
                        .filter(|&&v| v <= n && pairing.column_of(v) == col)
                        .count() as u64;
                    kmax - removed
                }
                ColumnRule::FiniteValues(vals) => vals
                    .iter()
                    .filter(|&&v| v <= n && pairing.column_of(v) == col)
                    .count() as u64,
                ColumnRule::Subsample { first, step } => {
                    if kmax < *first {
                        0
                    } else {
                        (kmax - *first) / *step + 1
                    }
                }
                ColumnRule::Positions(ep) => ep.count(kmax),
            };
        }
        total
    }
}

impl SetExpr {
    pub fn naturals() -> SetExpr {
        SetExpr::Ep(EpSet::all())
    }

    pub fn empty() -> SetExpr {
        SetExpr::Ep(EpSet::empty())
    }

    pub fn finite<I: IntoIterator<Item = u64>>(elems: I) -> SetExpr {
        SetExpr::Finite(elems.into_iter().filter(|&e| e >= 1).collect())
    }

    pub fn ap(first: u64, step: u64) -> SetExpr {
        SetExpr::Ap { first, step }
    }

    pub fn evens() -> SetExpr {
        SetExpr::ap(0, 2)
    }

    pub fn odds() -> SetExpr {
        SetExpr::ap(1, 2)
    }

    /// The tail `{m, m+1, ...}`.
    pub fn tail(m: u64) -> SetExpr {
        SetExpr::Ep(EpSet::from_tail(m))
    }

    /// The whole column `m` of the fixed pairing.
    pub fn column(m: u64) -> SetExpr {
        SetExpr::Columns(ColumnSet::new(
            ColumnSelector::Finite([m].into_iter().collect()),
            ColumnRule::Full,
        ))
    }

    pub fn compl(self) -> SetExpr {
        SetExpr::Compl(Box::new(self))
    }

    pub fn union(self, other: SetExpr) -> SetExpr {
        SetExpr::Union(vec![self, other])
    }

    pub fn inter(self, other: SetExpr) -> SetExpr {
        SetExpr::Inter(vec![self, other])
    }

    pub fn diff(self, other: SetExpr) -> SetExpr {
        SetExpr::Diff(Box::new(self), Box::new(other))
    }

    /// Structural membership evaluation; total on every expression.
    pub fn member(&self, n: u64) -> bool {
        if n == 0 {
            return false;
        }
        match self {
            SetExpr::Finite(s) => s.contains(&n),
            SetExpr::Ap { first, step } => n >= 1.max(*first) && (n - first) % step == 0,
            SetExpr::Ep(ep) => ep.member(n),
            SetExpr::Columns(cs) => cs.member(n),
            SetExpr::Selector { blocking, choice } => blocking.is_chosen(n, *choice),
            SetExpr::Compl(inner) => !inner.member(n),
            SetExpr::Union(parts) => parts.iter().any(|p| p.member(n)),
            SetExpr::Inter(parts) => parts.iter().all(|p| p.member(n)),
            SetExpr::Diff(a, b) => a.member(n) && !b.member(n),
        }
    }

    /// Exact `|self ∩ [1, n]|`. Uses closed forms where the structure
    /// admits them and falls back to enumeration otherwise.
    pub fn counting(&self, n: u64) -> u64 {
        match self {
            SetExpr::Finite(s) => s.iter().filter(|&&e| e <= n).count() as u64,
            SetExpr::Ap { first, step } => {
                let start = if *first >= 1 { *first } else { *step };
                if n < start {
                    0
                } else {
                    (n - start) / step + 1
                }
            }
            SetExpr::Ep(ep) => ep.count(n),
            SetExpr::Columns(cs) => cs.count(n),
            SetExpr::Selector { blocking, choice } => blocking.count_chosen(n, *choice),
            SetExpr::Compl(inner) => n - inner.counting(n),
            _ => {
                if let Some(ep) = self.normalize() {
                    ep.count(n)
                } else {
                    (1..=n).filter(|&k| self.member(k)).count() as u64
                }
            }
        }
    }

    /// Eventually periodic normal form, available exactly when the
    /// expression contains only finite / arithmetic-progression /
    /// eventually-periodic leaves.
    pub fn normalize(&self) -> Option<EpSet> {
        match self {
            SetExpr::Finite(s) => Some(EpSet::from_elems(s.iter().copied())),
            SetExpr::Ap { first, step } => {
                if *step == 0 {
                    return None;
                }
                Some(EpSet::from_ap(*first, *step))
            }
            SetExpr::Ep(ep) => Some(ep.clone()),
            SetExpr::Columns(_) | SetExpr::Selector { .. } => None,
            SetExpr::Compl(inner) => Some(inner.normalize()?.complement()),
            SetExpr::Union(parts) => {
                let mut acc = EpSet::empty();
                for p in parts {
                    acc = acc.binop(&p.normalize()?, BoolOp::Union)?;
                }
                Some(acc)
            }
            SetExpr::Inter(parts) => {
                let mut acc = EpSet::all();
                for p in parts {
                    acc = acc.binop(&p.normalize()?, BoolOp::Inter)?;
                }
                Some(acc)
            }
            SetExpr::Diff(a, b) => a.normalize()?.binop(&b.normalize()?, BoolOp::Diff),
        }
    }

    /// Enumerates members in `[1, horizon]`.
    pub fn enumerate_upto(&self, horizon: u64) -> Vec<u64> {
        match self {
            SetExpr::Finite(s) => s.iter().copied().filter(|&e| e <= horizon).collect(),
            SetExpr::Ap { first, step } => {
                let start = if *first >= 1 { *first } else { *step };
                (start..=horizon).step_by(*step as usize).collect()
            }
            _ => (1..=horizon).filter(|&n| self.member(n)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_examples() {
        assert!(SetExpr::ap(0, 2).member(4));
        assert!(!SetExpr::finite([1, 2, 3]).clone().compl().member(2));
        assert!(SetExpr::finite([1, 2, 3]).compl().member(4));
    }

    #[test]
    fn counting_examples() {
        assert_eq!(SetExpr::ap(0, 2).counting(100), 50);
        // Brute-forced square numbers up to 10^6 frozen as a finite set.
        let squares = SetExpr::finite((1..=1000u64).map(|k| k * k));
        assert_eq!(squares.counting(1_000_000), 1000);
        assert_eq!(squares.counting(999_999), 999);
    }

    #[test]
    fn complement_counting_identity() {
        let s = SetExpr::ap(2, 3).union(SetExpr::finite([1, 7]));
        for n in (1..=10_000u64).step_by(373) {
            assert_eq!(s.counting(n) + s.clone().compl().counting(n), n);
        }
    }

    #[test]
    fn normalize_union_of_residues_is_everything() {
        let all = SetExpr::evens().union(SetExpr::odds());
        let ep = all.normalize().unwrap();
        assert_eq!(ep, EpSet::all());
        assert_eq!(ep.prefix_len(), 0);
        assert_eq!(ep.period_word(), &[true]);
    }

    #[test]
    fn normalize_intersection_lcm() {
        let m6 = SetExpr::ap(0, 2).inter(SetExpr::ap(0, 3));
        let ep = m6.normalize().unwrap();
        assert_eq!(ep.period_len(), 6);
        for n in 1..=10_000 {
            assert_eq!(m6.member(n), ep.member(n));
        }
    }

    #[test]
    fn column_set_membership_and_counting() {
        let pairing = ColumnPartition;
        // Column 2, every other position starting at the first.
        let cs = ColumnSet::new(
            ColumnSelector::Finite([2].into_iter().collect()),
            ColumnRule::Subsample { first: 1, step: 2 },
        );
        let expr = SetExpr::Columns(cs);
        let mut count = 0;
        for n in 1..=5000u64 {
            let (pos, col) = pairing.pair_of(n);
            let expect = col == 2 && pos % 2 == 1;
            assert_eq!(expr.member(n), expect, "n={n}");
            if expect {
                count += 1;
            }
            assert_eq!(expr.counting(n), count, "n={n}");
        }
    }

    #[test]
    fn colset_normalize_is_absent() {
        let cs = SetExpr::column(1);
        assert!(cs.normalize().is_none());
    }
}
