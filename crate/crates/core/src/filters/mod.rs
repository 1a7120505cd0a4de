//! Concrete free filters on ℕ with certificate-producing membership
//! and stationarity decision procedures, plus the filter algebra
//! (trace, sum, product) and the combinatorial witness procedures.

pub mod decide;
pub mod json;
pub mod verdict;
pub mod witness;

pub use verdict::{Certificate, IneqRecord, Relation, Status, Verdict};
pub use witness::{
    block_respecting_check, diagonal_check, split_stationary, standard_embedding,
    strongly_diagonal_witness, BaseChain, EmbeddingDescriptor,
};

use num_traits::Zero;

use crate::error::FilterlabError;
use crate::ratio::format_rational;
use crate::setalg::{cardinality, column_analysis, ColumnPartition, EpSet, SetExpr};
use decide::certified_zero;

/// A concrete filter with decidable (or horizon-checkable) membership.
///
/// All supported kinds are free: every cofinite set is a member and the
/// empty set never is. `ColumnFdTail` is the column filter generated by
/// the sets `B_{m,C} = ⋃_{n≥m} (D_n \ C_n)` (drop finitely many whole
/// columns, then finitely many points per remaining column);
/// `ColumnFdEvery` keeps every column and drops finitely many points in
/// each.
#[derive(Debug, Clone, PartialEq)]
pub enum FilterHandle {
    Frechet,
    CountableBase {
        base: BaseSpec,
    },
    Statistical,
    ColumnFdTail,
    ColumnFdEvery,
    Trace {
        parent: Box<FilterHandle>,
        within: SetExpr,
    },
    Sum {
        left: Box<FilterHandle>,
        left_ground: SetExpr,
        right: Box<FilterHandle>,
        right_ground: SetExpr,
    },
    Product {
        rows: Box<FilterHandle>,
        cols: Box<FilterHandle>,
    },
}

/// Base of a countable-base filter: the tails base generates exactly
/// the Fréchet filter; an explicit decreasing list generates the filter
/// spanned by the list together with the cofinite sets.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseSpec {
    Tails,
    Explicit(Vec<SetExpr>),
}

impl FilterHandle {
    pub fn frechet() -> Self {
        FilterHandle::Frechet
    }

    pub fn statistical() -> Self {
        FilterHandle::Statistical
    }

    pub fn countable_tails() -> Self {
        FilterHandle::CountableBase {
            base: BaseSpec::Tails,
        }
    }

    /// Trace on a stationary set. The precondition is stationarity of
    /// `within`: a certified non-stationary set is rejected.
    pub fn trace(self, within: SetExpr, horizon: u64) -> Result<FilterHandle, FilterlabError> {
        if self.is_stationary(&within, horizon).is_refuted() {
            return Err(FilterlabError::InvalidTrace(
                "trace set is certified non-stationary".into(),
            ));
        }
        Ok(FilterHandle::Trace {
            parent: Box::new(self),
            within,
        })
    }

    /// Sum of two filters over disjoint ground sets.
    pub fn sum(
        left: FilterHandle,
        left_ground: SetExpr,
        right: FilterHandle,
        right_ground: SetExpr,
    ) -> Result<FilterHandle, FilterlabError> {
        let overlap = left_ground.clone().inter(right_ground.clone());
        let disjoint = match overlap.normalize() {
            Some(ep) => ep.is_empty_set(),
            None => match column_analysis(&overlap) {
                Some(a) => a.is_empty(),
                None => false,
            },
        };
        if !disjoint {
            return Err(FilterlabError::InvalidArgument(
                "sum requires certified disjoint ground sets".into(),
            ));
        }
        Ok(FilterHandle::Sum {
            left: Box::new(left),
            left_ground,
            right: Box::new(right),
            right_ground,
        })
    }

    pub fn product(rows: FilterHandle, cols: FilterHandle) -> FilterHandle {
        FilterHandle::Product {
            rows: Box::new(rows),
            cols: Box::new(cols),
        }
    }

    /// Does the set belong to the filter?
    pub fn contains(&self, set: &SetExpr, horizon: u64) -> Verdict {
        let horizon = horizon.max(16);
        match self {
            FilterHandle::Frechet => contains_frechet(set, horizon),
            FilterHandle::CountableBase { base } => match base {
                BaseSpec::Tails => contains_frechet(set, horizon),
                BaseSpec::Explicit(list) => match list.last() {
                    None => contains_frechet(set, horizon),
                    Some(smallest) => {
                        let residual = smallest.clone().diff(set.clone());
                        contains_frechet(&residual.compl(), horizon)
                            .via("residual of the smallest base set is finite")
                    }
                },
            },
            FilterHandle::Statistical => contains_statistical(set, horizon),
            FilterHandle::ColumnFdTail => contains_column_tail(set, horizon, false),
            FilterHandle::ColumnFdEvery => contains_column_tail(set, horizon, true),
            FilterHandle::Trace { parent, within } => parent
                .contains(&set.clone().union(complement_of(within)), horizon)
                .via("trace: tests A ∪ complement(I) in the parent"),
            FilterHandle::Sum {
                left,
                left_ground,
                right,
                right_ground,
            } => {
                let lv = left.contains(&set.clone().union(complement_of(left_ground)), horizon);
                let rv = right.contains(&set.clone().union(complement_of(right_ground)), horizon);
                Verdict::all_of(
                    vec![("left part".into(), lv), ("right part".into(), rv)],
                    horizon,
                )
            }
            FilterHandle::Product { rows, cols } => contains_product(rows, cols, set, horizon),
        }
    }

    /// Is the set stationary (does it meet every member)?
    pub fn is_stationary(&self, set: &SetExpr, horizon: u64) -> Verdict {
        let horizon = horizon.max(16);
        match self {
            FilterHandle::Frechet => stationary_frechet(set, horizon),
            FilterHandle::CountableBase { base } => match base {
                BaseSpec::Tails => stationary_frechet(set, horizon),
                BaseSpec::Explicit(list) => match list.last() {
                    None => stationary_frechet(set, horizon),
                    Some(smallest) => {
                        stationary_frechet(&set.clone().inter(smallest.clone()), horizon)
                            .via("meets the smallest base set infinitely")
                    }
                },
            },
            FilterHandle::Statistical => stationary_statistical(set, horizon),
            FilterHandle::ColumnFdTail => stationary_column_tail(set, horizon),
            FilterHandle::ColumnFdEvery => stationary_column_every(set, horizon),
            FilterHandle::Trace { parent, within } => parent
                .is_stationary(&set.clone().inter(within.clone()), horizon)
                .via("trace: A ∩ I stationary in the parent"),
            FilterHandle::Sum {
                left,
                left_ground,
                right,
                right_ground,
            } => {
                let lv = left.is_stationary(&set.clone().inter(left_ground.clone()), horizon);
                let rv = right.is_stationary(&set.clone().inter(right_ground.clone()), horizon);
                Verdict::any_of(
                    vec![("left part".into(), lv), ("right part".into(), rv)],
                    horizon,
                )
            }
            FilterHandle::Product { .. } => self
                .contains(&complement_of(set), horizon)
                .negate()
                .via("stationary iff the complement is not a member"),
        }
    }
}

/// Structural complement with double-negation collapse.
pub fn complement_of(set: &SetExpr) -> SetExpr {
    match set {
        SetExpr::Compl(inner) => (**inner).clone(),
        other => other.clone().compl(),
    }
}

fn checkpoints(horizon: u64) -> Vec<u64> {
    let mut cs: Vec<u64> = vec![horizon / 4, horizon / 2, horizon];
    cs.retain(|&c| c >= 1);
    cs.dedup();
    cs
}

fn sample_members(set: &SetExpr, horizon: u64, max: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(max.min(64));
    for n in 1..=horizon {
        if set.member(n) {
            out.push(n);
            if out.len() >= max {
                break;
            }
        }
    }
    out
}

fn count_evidence(set: &SetExpr, horizon: u64) -> Certificate {
    Certificate::HorizonEvidence {
        counts: checkpoints(horizon)
            .into_iter()
            .map(|c| (c, set.counting(c)))
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Fréchet
// ---------------------------------------------------------------------------

fn contains_frechet(set: &SetExpr, horizon: u64) -> Verdict {
    let compl = complement_of(set);
    if let Some(ep) = compl.normalize() {
        return if ep.is_finite() {
            Verdict::proved(
                Certificate::CofiniteMember {
                    complement_max: ep.max_elem().unwrap_or(0),
                },
                horizon,
            )
        } else {
            Verdict::refuted(
                Certificate::InfiniteComplement {
                    sample: sample_members(&compl, horizon, 16),
                },
                horizon,
            )
        };
    }
    if let Some(analysis) = column_analysis(&compl) {
        return if analysis.is_infinite() {
            Verdict::refuted(
                Certificate::InfiniteComplement {
                    sample: sample_members(&compl, horizon, 16),
                },
                horizon,
            )
        } else {
            let pairing = ColumnPartition;
            let mut max = 0;
            for (i, col) in analysis.head.iter().enumerate() {
                if let Some(m) = col.max_elem() {
                    max = max.max(pairing.column_element(i as u64 + 1, m));
                }
            }
            Verdict::proved(Certificate::CofiniteMember { complement_max: max }, horizon)
        };
    }
    match cardinality(&compl).infinite {
        Some(true) => Verdict::refuted(
            Certificate::InfiniteComplement {
                sample: sample_members(&compl, horizon, 16),
            },
            horizon,
        ),
        Some(false) => {
            let max = sample_members(&compl, horizon, usize::MAX)
                .last()
                .copied()
                .unwrap_or(0);
            Verdict::proved(Certificate::CofiniteMember { complement_max: max }, horizon)
        }
        None => Verdict::consistent(count_evidence(&compl, horizon), horizon),
    }
}

fn stationary_frechet(set: &SetExpr, horizon: u64) -> Verdict {
    match cardinality(set).infinite {
        Some(true) => Verdict::proved(
            Certificate::InfiniteWitness {
                counts: checkpoints(horizon)
                    .into_iter()
                    .map(|c| (c, set.counting(c)))
                    .collect(),
            },
            horizon,
        ),
        Some(false) => Verdict::refuted(count_evidence(set, horizon), horizon).via("set is finite"),
        None => Verdict::consistent(count_evidence(set, horizon), horizon),
    }
}

// ---------------------------------------------------------------------------
// Statistical
// ---------------------------------------------------------------------------

fn zero_cert_checkpoints(
    set: &SetExpr,
    bound: &decide::ZeroBound,
    horizon: u64,
) -> Vec<(u64, u64, u64)> {
    checkpoints(horizon)
        .into_iter()
        .map(|c| (c, set.counting(c), bound.value(c)))
        .collect()
}

/// Positive lower bound for the upper density, when one is certifiable.
fn certified_positive_upper(set: &SetExpr) -> Option<num_rational::BigRational> {
    if let Some(ep) = set.normalize() {
        let d = ep.density();
        return if d.is_zero() { None } else { Some(d) };
    }
    match set {
        SetExpr::Union(parts) => parts.iter().find_map(certified_positive_upper),
        SetExpr::Diff(a, b) => {
            let lower = certified_positive_upper(a)?;
            certified_zero(b).map(|_| lower)
        }
        SetExpr::Compl(inner) => {
            // The complement of a certified-negligible set has density 1.
            if certified_zero(inner).is_some() {
                return Some(num_traits::One::one());
            }
            if matches!(
                **inner,
                SetExpr::Compl(_) | SetExpr::Union(_) | SetExpr::Inter(_) | SetExpr::Diff(_, _)
            ) {
                certified_positive_upper(&decide::push_complement(inner))
            } else {
                None
            }
        }
        _ => None,
    }
}

fn contains_statistical(set: &SetExpr, horizon: u64) -> Verdict {
    let compl = complement_of(set);
    if let Some(ep) = compl.normalize() {
        let d = ep.density();
        let exact = format_rational(&d);
        let cert = Certificate::ComplementDensity {
            density: exact,
            exact: true,
        };
        return if d.is_zero() {
            Verdict::proved(cert, horizon)
        } else {
            Verdict::refuted(cert, horizon)
        };
    }
    if let Some(bound) = certified_zero(&compl) {
        return Verdict::proved(
            Certificate::SublinearComplement {
                bound: bound.describe(),
                checkpoints: zero_cert_checkpoints(&compl, &bound, horizon),
            },
            horizon,
        );
    }
    if let Some(bound) = certified_zero(set) {
        // The set itself is negligible, so its complement has density 1.
        return Verdict::refuted(
            Certificate::MemberDensityZero {
                bound: bound.describe(),
                checkpoints: zero_cert_checkpoints(set, &bound, horizon),
            },
            horizon,
        );
    }
    if let Some(lower) = certified_positive_upper(&compl) {
        return Verdict::refuted(
            Certificate::StationaryDensity {
                lower: format_rational(&lower),
                exact: false,
            },
            horizon,
        )
        .via("complement has certified positive upper density");
    }
    Verdict::consistent(count_evidence(&compl, horizon), horizon)
}

fn stationary_statistical(set: &SetExpr, horizon: u64) -> Verdict {
    if let Some(ep) = set.normalize() {
        let d = ep.density();
        if !d.is_zero() {
            return Verdict::proved(
                Certificate::StationaryDensity {
                    lower: format_rational(&d),
                    exact: true,
                },
                horizon,
            );
        }
    }
    if let Some(bound) = certified_zero(set) {
        return Verdict::refuted(
            Certificate::MemberDensityZero {
                bound: bound.describe(),
                checkpoints: zero_cert_checkpoints(set, &bound, horizon),
            },
            horizon,
        );
    }
    if let Some(lower) = certified_positive_upper(set) {
        return Verdict::proved(
            Certificate::StationaryDensity {
                lower: format_rational(&lower),
                exact: false,
            },
            horizon,
        );
    }
    // Members of a free filter meet every member, so they are
    // stationary outright.
    let membership = contains_statistical(set, horizon);
    if membership.is_proved() {
        return membership.via("filter members are stationary");
    }
    Verdict::consistent(count_evidence(set, horizon), horizon)
}

// ---------------------------------------------------------------------------
// Column filters
// ---------------------------------------------------------------------------

/// Membership for the column filters. With `everywhere = false` this is
/// the tail filter (all columns from some index on must be cofinitely
/// present); with `everywhere = true` every single column must be.
fn contains_column_tail(set: &SetExpr, horizon: u64, everywhere: bool) -> Verdict {
    let analysis = match column_analysis(set) {
        Some(a) => a,
        None => return Verdict::consistent(count_evidence(set, horizon), horizon),
    };
    let pairing = ColumnPartition;
    let pos_cap = |col: u64| pairing.column_count_upto(col, horizon).max(8);
    match analysis.eventually_cofinite_columns() {
        Ok(from) => {
            if everywhere && from > 1 {
                let witness = (1..from)
                    .rev()
                    .find(|&m| !analysis.column(m).is_cofinite())
                    .expect("from > 1 implies a non-cofinite head column");
                let cap = pos_cap(witness);
                return Verdict::refuted(
                    Certificate::ColumnObstruction {
                        witness_column: witness,
                        class_period: 0,
                        sampled_absent: vec![(witness, cap - analysis.column(witness).count(cap))],
                    },
                    horizon,
                );
            }
            let from = if everywhere { 1 } else { from };
            let sampled_missing: Vec<(u64, u64)> = (from..from + 6)
                .map(|m| {
                    let cap = pos_cap(m);
                    (m, cap - analysis.column(m).count(cap))
                })
                .collect();
            Verdict::proved(
                Certificate::ColumnTailMember {
                    from,
                    sampled_missing,
                },
                horizon,
            )
        }
        Err(witness_class) => {
            let period = analysis.tail.len() as u64;
            let sampled_absent: Vec<(u64, u64)> = (0..4)
                .map(|i| {
                    let m = witness_class + i * period;
                    let cap = pos_cap(m);
                    (m, cap - analysis.column(m).count(cap))
                })
                .collect();
            Verdict::refuted(
                Certificate::ColumnObstruction {
                    witness_column: witness_class,
                    class_period: period,
                    sampled_absent,
                },
                horizon,
            )
        }
    }
}

fn stationary_column_tail(set: &SetExpr, horizon: u64) -> Verdict {
    let analysis = match column_analysis(set) {
        Some(a) => a,
        None => return Verdict::consistent(count_evidence(set, horizon), horizon),
    };
    let pairing = ColumnPartition;
    if let Some(class_col) = analysis.infinitely_many_infinite_columns() {
        let period = analysis.tail.len() as u64;
        let witness_columns: Vec<u64> = (0..8).map(|i| class_col + i * period).collect();
        let sampled_counts: Vec<(u64, u64)> = witness_columns
            .iter()
            .map(|&m| {
                let cap = pairing.column_count_upto(m, horizon);
                (m, analysis.column(m).count(cap))
            })
            .collect();
        return Verdict::proved(
            Certificate::ColumnStationary {
                witness_columns,
                sampled_counts,
            },
            horizon,
        );
    }
    let infinite_heads = analysis.infinite_columns_upto(analysis.head.len() as u64);
    Verdict::refuted(
        Certificate::ColumnStationaryFails {
            infinite_columns: infinite_heads,
        },
        horizon,
    )
}

fn stationary_column_every(set: &SetExpr, horizon: u64) -> Verdict {
    let analysis = match column_analysis(set) {
        Some(a) => a,
        None => return Verdict::consistent(count_evidence(set, horizon), horizon),
    };
    let pairing = ColumnPartition;
    let head_infinite = analysis.infinite_columns_upto(analysis.head.len() as u64);
    let class_infinite = analysis.infinitely_many_infinite_columns();
    let witness = match head_infinite.first().copied().or(class_infinite) {
        Some(w) => w,
        None => {
            return Verdict::refuted(
                Certificate::ColumnStationaryFails {
                    infinite_columns: vec![],
                },
                horizon,
            )
        }
    };
    let cap = pairing.column_count_upto(witness, horizon);
    Verdict::proved(
        Certificate::ColumnStationary {
            witness_columns: vec![witness],
            sampled_counts: vec![(witness, analysis.column(witness).count(cap))],
        },
        horizon,
    )
}

// ---------------------------------------------------------------------------
// Product
// ---------------------------------------------------------------------------

fn contains_product(
    rows: &FilterHandle,
    cols: &FilterHandle,
    set: &SetExpr,
    horizon: u64,
) -> Verdict {
    let analysis = match column_analysis(set) {
        Some(a) => a,
        None => return Verdict::consistent(count_evidence(set, horizon), horizon),
    };
    if analysis.head.len() > 256 {
        return Verdict::consistent_note(
            "product decision skipped: too many irregular columns",
            horizon,
        );
    }
    let mut parts: Vec<(String, Verdict)> = Vec::new();
    let mut head_proved = Vec::new();
    let mut head_possible = Vec::new();
    for (i, colset) in analysis.head.iter().enumerate() {
        let v = rows.contains(&SetExpr::Ep(colset.clone()), horizon);
        head_proved.push(v.status == Status::Proved);
        head_possible.push(v.status != Status::Refuted);
        parts.push((format!("rows of column {}", i + 1), v));
    }
    let mut tail_proved = Vec::new();
    let mut tail_possible = Vec::new();
    for (j, class) in analysis.tail.iter().enumerate() {
        let v = rows.contains(&SetExpr::Ep(class.clone()), horizon);
        tail_proved.push(v.status == Status::Proved);
        tail_possible.push(v.status != Status::Refuted);
        parts.push((format!("rows of tail class {j}"), v));
    }
    let proved_cols = SetExpr::Ep(EpSet::new(head_proved, tail_proved));
    let possible_cols = SetExpr::Ep(EpSet::new(head_possible, tail_possible));
    let proved_verdict = cols.contains(&proved_cols, horizon);
    if proved_verdict.is_proved() {
        // Rectangle found: rows over the proved column set. The row
        // verdicts stay as evidence; refuted columns are simply not
        // part of the rectangle.
        parts.push(("columns with member rows".into(), proved_verdict));
        return Verdict {
            status: Status::Proved,
            certificate: Certificate::AllOf { parts },
            horizon,
        };
    }
    let possible_verdict = cols.contains(&possible_cols, horizon);
    if possible_verdict.is_refuted() {
        parts.push(("columns with possibly-member rows".into(), possible_verdict));
        return Verdict {
            status: Status::Refuted,
            certificate: Certificate::AllOf { parts },
            horizon,
        };
    }
    parts.push(("columns with member rows".into(), proved_verdict));
    Verdict {
        status: Status::Consistent,
        certificate: Certificate::AllOf { parts },
        horizon,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;
    use crate::setalg::{Blocking, Choice, ColumnRule, ColumnSelector, ColumnSet};

    const H: u64 = 1 << 14;

    #[test]
    fn frechet_membership() {
        let f = FilterHandle::Frechet;
        assert!(f.contains(&SetExpr::finite([1, 2, 3]).compl(), H).is_proved());
        assert!(f.contains(&SetExpr::evens(), H).is_refuted());
        assert!(f.contains(&SetExpr::empty(), H).is_refuted());
        assert!(f.is_stationary(&SetExpr::evens(), H).is_proved());
        assert!(f.is_stationary(&SetExpr::finite([4, 5]), H).is_refuted());
    }

    #[test]
    fn statistical_membership_examples() {
        let f = FilterHandle::Statistical;
        // Complement of the evens has density 1/2: refuted.
        let v = f.contains(&complement_of(&SetExpr::evens()), H);
        assert!(v.is_refuted());
        match v.certificate {
            Certificate::ComplementDensity { density, exact } => {
                assert_eq!(density, "1/2");
                assert!(exact);
            }
            other => panic!("unexpected certificate {other:?}"),
        }
        // Complement of the dyadic min selector: proved via the
        // logarithmic counting bound.
        let sel = SetExpr::Selector {
            blocking: Box::new(Blocking::Dyadic),
            choice: Choice::Min,
        };
        let v = f.contains(&sel.clone().compl(), 1 << 20);
        assert!(v.is_proved());
        match &v.certificate {
            Certificate::SublinearComplement { checkpoints, .. } => {
                for (n, count, bound) in checkpoints {
                    assert!(count <= bound, "count {count} > bound {bound} at {n}");
                }
                assert_eq!(checkpoints.last().unwrap().1, 21);
            }
            other => panic!("unexpected certificate {other:?}"),
        }
        // Stationarity via density.
        assert!(f.is_stationary(&SetExpr::evens(), H).is_proved());
        assert!(f.is_stationary(&sel, H).is_refuted());
    }

    #[test]
    fn column_filter_membership() {
        let fd = FilterHandle::ColumnFdTail;
        // B_{3,C} with C = first two positions of each column from 3 on.
        let b3 = SetExpr::Columns(ColumnSet::new(
            ColumnSelector::From(3),
            ColumnRule::Positions(EpSet::from_tail(3)),
        ));
        assert!(fd.contains(&b3, H).is_proved());
        // A single column is not a member and not stationary.
        assert!(fd.contains(&SetExpr::column(1), H).is_refuted());
        assert!(fd.is_stationary(&SetExpr::column(1), H).is_refuted());
        // A standard set (every second position of every column) is
        // stationary but not a member.
        let standard = SetExpr::Columns(ColumnSet::new(
            ColumnSelector::All,
            ColumnRule::Subsample { first: 1, step: 2 },
        ));
        assert!(fd.is_stationary(&standard, H).is_proved());
        assert!(fd.contains(&standard, H).is_refuted());
        // Cofinite sets are members (freeness).
        assert!(fd.contains(&SetExpr::finite([2, 9]).compl(), H).is_proved());

        let fde = FilterHandle::ColumnFdEvery;
        assert!(fde.contains(&b3, H).is_refuted()); // kills columns 1, 2
        assert!(fde.contains(&SetExpr::finite([2, 9]).compl(), H).is_proved());
        // Stationary for the everywhere filter: one infinite column suffices.
        assert!(fde.is_stationary(&SetExpr::column(1), H).is_proved());
        let sparse = SetExpr::Columns(ColumnSet::new(
            ColumnSelector::All,
            ColumnRule::FiniteValues([1, 2, 4].into_iter().collect()),
        ));
        assert!(fde.is_stationary(&sparse, H).is_refuted());
    }

    #[test]
    fn trace_of_frechet_on_evens() {
        let f = FilterHandle::Frechet.trace(SetExpr::evens(), H).unwrap();
        // Members are exactly the sets containing cofinitely many evens.
        assert!(f.contains(&SetExpr::evens(), H).is_proved());
        assert!(f
            .contains(&SetExpr::evens().diff(SetExpr::finite([2, 4])), H)
            .is_proved());
        assert!(f.contains(&SetExpr::ap(0, 4), H).is_refuted());
        // Trace over a certified non-stationary set errors.
        assert!(matches!(
            FilterHandle::Frechet.trace(SetExpr::finite([1]), H),
            Err(FilterlabError::InvalidTrace(_))
        ));
    }

    #[test]
    fn sum_of_frechet_and_statistical() {
        let f = FilterHandle::sum(
            FilterHandle::Frechet,
            SetExpr::odds(),
            FilterHandle::Statistical,
            SetExpr::evens(),
        )
        .unwrap();
        // Contains iff odd part cofinite-in-odds and even part has
        // relative density 1. The odds themselves miss all evens.
        assert!(f.contains(&SetExpr::odds(), H).is_refuted());
        assert!(f.contains(&SetExpr::naturals(), H).is_proved());
        let almost_all = SetExpr::naturals().diff(SetExpr::finite([1, 2, 6]));
        assert!(f.contains(&almost_all, H).is_proved());
        // Remove a positive-density slice of the evens: refuted.
        assert!(f
            .contains(&SetExpr::naturals().diff(SetExpr::ap(0, 4)), H)
            .is_refuted());
        // Stationarity: either side works.
        assert!(f.is_stationary(&SetExpr::ap(0, 4), H).is_proved());
        assert!(f.is_stationary(&SetExpr::finite([3]), H).is_refuted());
        // Disjointness enforced.
        assert!(FilterHandle::sum(
            FilterHandle::Frechet,
            SetExpr::evens(),
            FilterHandle::Frechet,
            SetExpr::ap(0, 4),
        )
        .is_err());
    }

    #[test]
    fn product_of_frechet_rectangle() {
        let f = FilterHandle::product(FilterHandle::Frechet, FilterHandle::Frechet);
        // Rectangle ℕ × (ℕ \ {1..k}): all rows, columns from k+1 on.
        let rect = SetExpr::Columns(ColumnSet::new(ColumnSelector::From(4), ColumnRule::Full));
        assert!(f.contains(&rect, H).is_proved());
        // A single column is not a member.
        assert!(f.contains(&SetExpr::column(2), H).is_refuted());
        // Rows clipped to a finite set in every column: refuted.
        let thin = SetExpr::Columns(ColumnSet::new(
            ColumnSelector::All,
            ColumnRule::Positions(EpSet::from_elems([1, 2, 3])),
        ));
        assert!(f.contains(&thin, H).is_refuted());
    }

    #[test]
    fn statistical_densities_cross_check() {
        let f = FilterHandle::Statistical;
        let v = f.is_stationary(&SetExpr::evens(), H);
        match v.certificate {
            Certificate::StationaryDensity { lower, exact } => {
                assert_eq!(crate::ratio::parse_rational(&lower).unwrap(), rat(1, 2));
                assert!(exact);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
