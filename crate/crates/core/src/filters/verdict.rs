//! Three-valued verdicts with machine-checkable certificates.
//!
//! No decision procedure in the crate returns a bare boolean: every
//! check yields Proved, Refuted, or Consistent-at-horizon, and the
//! first two carry certificate data that `cert::verify_verdict`
//! re-validates without re-running the procedure.

use serde::{Deserialize, Serialize};

use crate::ratio::parse_rational;
use crate::setalg::SetExpr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Proved,
    Refuted,
    Consistent,
}

impl Status {
    pub fn negate(self) -> Status {
        match self {
            Status::Proved => Status::Refuted,
            Status::Refuted => Status::Proved,
            Status::Consistent => Status::Consistent,
        }
    }

    /// Three-valued conjunction: refutation anywhere refutes, proof
    /// everywhere proves.
    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Refuted, _) | (_, Status::Refuted) => Status::Refuted,
            (Status::Proved, Status::Proved) => Status::Proved,
            _ => Status::Consistent,
        }
    }

    pub fn or(self, other: Status) -> Status {
        match (self, other) {
            (Status::Proved, _) | (_, Status::Proved) => Status::Proved,
            (Status::Refuted, Status::Refuted) => Status::Refuted,
            _ => Status::Consistent,
        }
    }
}

/// A recorded inequality `lhs REL rhs` over exact rationals, stored in
/// canonical text form so an independent checker can replay it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IneqRecord {
    pub label: String,
    pub lhs: String,
    pub relation: Relation,
    pub rhs: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl IneqRecord {
    pub fn new(
        label: impl Into<String>,
        lhs: &num_rational::BigRational,
        relation: Relation,
        rhs: &num_rational::BigRational,
    ) -> Self {
        IneqRecord {
            label: label.into(),
            lhs: crate::ratio::format_rational(lhs),
            relation,
            rhs: crate::ratio::format_rational(rhs),
        }
    }

    /// Re-evaluates the record; `None` when a side fails to parse.
    pub fn holds(&self) -> Option<bool> {
        let lhs = parse_rational(&self.lhs)?;
        let rhs = parse_rational(&self.rhs)?;
        Some(match self.relation {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        })
    }
}

/// Certificate payloads. Structured enough for an independent checker:
/// sets are embedded as expressions, numbers in exact text form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Certificate {
    /// No supporting data (used by Consistent verdicts with nothing to say).
    None,
    /// Free-text context for Consistent verdicts.
    Note { note: String },
    /// Membership because the complement is finite.
    CofiniteMember { complement_max: u64 },
    /// Non-membership because the complement is infinite; carries
    /// sampled complement elements.
    InfiniteComplement { sample: Vec<u64> },
    /// Exact natural density of the complement (statistical filter).
    ComplementDensity { density: String, exact: bool },
    /// The complement satisfies a certified sublinear counting bound,
    /// hence has density zero. Checkpoints record (n, count, bound).
    SublinearComplement {
        bound: String,
        checkpoints: Vec<(u64, u64, u64)>,
    },
    /// The set itself has certified density zero, so it cannot be a
    /// member of the statistical filter (its complement misses density 1).
    MemberDensityZero {
        bound: String,
        checkpoints: Vec<(u64, u64, u64)>,
    },
    /// Column-filter membership: from column `from` on, the set misses
    /// only finitely many positions per column. Samples record
    /// (column, missing positions up to the horizon).
    ColumnTailMember {
        from: u64,
        sampled_missing: Vec<(u64, u64)>,
    },
    /// Column-filter non-membership: representative column (and class
    /// period) with infinitely many absent positions; samples record
    /// (column, absent count at horizon).
    ColumnObstruction {
        witness_column: u64,
        class_period: u64,
        sampled_absent: Vec<(u64, u64)>,
    },
    /// Stationarity via positive (upper) density.
    StationaryDensity { lower: String, exact: bool },
    /// Stationarity of an infinite set for the Fréchet filter; counts
    /// record (checkpoint, members ≤ checkpoint).
    InfiniteWitness { counts: Vec<(u64, u64)> },
    /// Stationarity for a column filter: witness columns with infinite
    /// intersection; samples record (column, count at horizon).
    ColumnStationary {
        witness_columns: Vec<u64>,
        sampled_counts: Vec<(u64, u64)>,
    },
    /// Finitely many columns meet the set infinitely; violates the
    /// infinitely-many-infinite-columns criterion.
    ColumnStationaryFails {
        infinite_columns: Vec<u64>,
    },
    /// A selector set witnessing the block-respecting property:
    /// one point per piece, stationarity certified separately.
    BlockSelector {
        selector: SetExpr,
        blocks_checked: u64,
        stationarity: Box<Verdict>,
    },
    /// Refutation of block-respecting: every unit selector has a
    /// certified sublinear count, so its complement is a member.
    /// `min_selector_*` instantiate the bound on the concrete
    /// min-selector; checkpoints record (n, pieces ≤ n, bound).
    SelectorRefutation {
        blocking: crate::setalg::Blocking,
        min_selector_count: u64,
        min_selector_horizon: u64,
        density_ratio: String,
        generic_bound: String,
        checkpoints: Vec<(u64, u64, u64)>,
    },
    /// Diagonal witness J with its almost-containment data:
    /// excesses record (n, |J \ A_n| observed ≤ horizon, allowed bound).
    DiagonalWitness {
        j: SetExpr,
        excesses: Vec<(u64, u64, u64)>,
        stationarity: Box<Verdict>,
    },
    /// Diagonal obstruction for column filters: per sampled column,
    /// a chain index whose member traces the column finitely.
    DiagonalObstruction {
        vanishing: Vec<(u64, u64, u64)>,
    },
    /// Strongly diagonal witness: picks with strictly increasing layer
    /// indices; `layer_bound_checked` is the n-range over which
    /// |(J ∩ A_n) \ A_{n+1}| ≤ 1 was re-verified.
    StrongDiagonal {
        picks: Vec<u64>,
        layers: Vec<u64>,
        layer_bound_checked: u64,
        base_sets_met: u64,
        stationarity: Box<Verdict>,
    },
    /// Both halves of a stationary split, with their verdicts.
    SplitWitness {
        first: SetExpr,
        second: SetExpr,
        first_stationary: Box<Verdict>,
        second_stationary: Box<Verdict>,
    },
    /// Compositional conjunction/disjunction/negation.
    AllOf { parts: Vec<(String, Verdict)> },
    AnyOf { parts: Vec<(String, Verdict)> },
    Negated { inner: Box<Verdict> },
    /// Labelled delegation (trace filters, derived arguments).
    Via { label: String, inner: Box<Verdict> },
    /// Raw inequality chain.
    Inequalities { records: Vec<IneqRecord> },
    /// The good-set route of a convergence check: the index set and
    /// the filter-membership verdict it received.
    GoodSet {
        set: SetExpr,
        membership: Box<Verdict>,
    },
    /// Horizon evidence: checkpoints of observed counts.
    HorizonEvidence { counts: Vec<(u64, u64)> },
}

/// The universal check result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub certificate: Certificate,
    pub horizon: u64,
}

impl Verdict {
    pub fn proved(certificate: Certificate, horizon: u64) -> Verdict {
        Verdict {
            status: Status::Proved,
            certificate,
            horizon,
        }
    }

    pub fn refuted(certificate: Certificate, horizon: u64) -> Verdict {
        Verdict {
            status: Status::Refuted,
            certificate,
            horizon,
        }
    }

    pub fn consistent(certificate: Certificate, horizon: u64) -> Verdict {
        Verdict {
            status: Status::Consistent,
            certificate,
            horizon,
        }
    }

    pub fn consistent_note(note: impl Into<String>, horizon: u64) -> Verdict {
        Verdict::consistent(
            Certificate::Note { note: note.into() },
            horizon,
        )
    }

    pub fn is_proved(&self) -> bool {
        self.status == Status::Proved
    }

    pub fn is_refuted(&self) -> bool {
        self.status == Status::Refuted
    }

    pub fn negate(self) -> Verdict {
        Verdict {
            status: self.status.negate(),
            horizon: self.horizon,
            certificate: Certificate::Negated {
                inner: Box::new(self),
            },
        }
    }

    pub fn all_of(parts: Vec<(String, Verdict)>, horizon: u64) -> Verdict {
        let status = parts
            .iter()
            .fold(Status::Proved, |acc, (_, v)| acc.and(v.status));
        Verdict {
            status,
            certificate: Certificate::AllOf { parts },
            horizon,
        }
    }

    pub fn any_of(parts: Vec<(String, Verdict)>, horizon: u64) -> Verdict {
        let status = parts
            .iter()
            .fold(Status::Refuted, |acc, (_, v)| acc.or(v.status));
        Verdict {
            status,
            certificate: Certificate::AnyOf { parts },
            horizon,
        }
    }

    pub fn via(self, label: impl Into<String>) -> Verdict {
        Verdict {
            status: self.status,
            horizon: self.horizon,
            certificate: Certificate::Via {
                label: label.into(),
                inner: Box::new(self),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_valued_tables() {
        use Status::*;
        assert_eq!(Proved.and(Proved), Proved);
        assert_eq!(Proved.and(Consistent), Consistent);
        assert_eq!(Consistent.and(Refuted), Refuted);
        assert_eq!(Refuted.or(Proved), Proved);
        assert_eq!(Refuted.or(Refuted), Refuted);
        assert_eq!(Consistent.or(Refuted), Consistent);
        assert_eq!(Consistent.negate(), Consistent);
        assert_eq!(Proved.negate(), Refuted);
    }

    #[test]
    fn ineq_records_replay() {
        let r = IneqRecord {
            label: "bound".into(),
            lhs: "21/1048576".into(),
            relation: Relation::Lt,
            rhs: "1/47619".into(),
        };
        assert_eq!(r.holds(), Some(true));
        let broken = IneqRecord {
            lhs: "3".into(),
            rhs: "2".into(),
            relation: Relation::Le,
            label: "tampered".into(),
        };
        assert_eq!(broken.holds(), Some(false));
    }
}
