//! Oscillation functionals: for a disjointly supported system, a
//! dual-ball functional hitting `a_n·‖z_n‖` on each term. With signs
//! alternating inside every column, the functional values oscillate by
//! twice the norm infimum per column, refuting weak convergence along
//! the column filter.

use num_rational::BigRational;
use num_traits::Signed;

use crate::error::FilterlabError;
use crate::filters::{IneqRecord, Relation};
use crate::l1seq::{SeqGen, TestFunctional};
use crate::ratio::format_rational;
use crate::setalg::ColumnPartition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignRule {
    /// `a_n = ±1` alternating along each column's enumeration, so both
    /// signs recur infinitely often in every column.
    AlternatingPerColumn,
    /// All `a_n = 1` (no oscillation; the degenerate control case).
    AllOnes,
}

impl SignRule {
    pub fn sign(&self, n: u64) -> i8 {
        match self {
            SignRule::AllOnes => 1,
            SignRule::AlternatingPerColumn => {
                if ColumnPartition.position_of(n) % 2 == 1 {
                    1
                } else {
                    -1
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OscillationReport {
    /// Per column: (column, max f(z_n), min f(z_n)) over the horizon.
    pub per_column: Vec<(u64, String, String)>,
    /// Smallest max−min over the reported columns.
    pub min_oscillation: String,
    /// Oscillation vs twice the norm infimum, per column.
    pub records: Vec<IneqRecord>,
    pub horizon: u64,
}

impl OscillationReport {
    pub fn verify(&self) -> bool {
        self.records.iter().all(|r| r.holds() == Some(true))
    }
}

/// Builds the sign functional for the system and reports per-column
/// oscillation of its values at the horizon. Overlapping supports are
/// rejected.
pub fn oscillation_functional(
    seq: &SeqGen,
    rule: SignRule,
    horizon: u64,
    columns: u64,
) -> Result<(TestFunctional, OscillationReport), FilterlabError> {
    let horizon = horizon.max(64).min(1 << 14);
    let mut blocks: Vec<(u64, u64, BigRational)> = Vec::new();
    for n in 1..=horizon {
        let x = seq.eval(n);
        if x.is_zero() {
            continue;
        }
        if x.scale_sqrt_half() {
            return Err(FilterlabError::InvalidArgument(
                "oscillation functionals run on unscaled systems".into(),
            ));
        }
        let a = BigRational::from_integer(rule.sign(n).into());
        for (k, c) in x.iter() {
            let sgn = if c.is_negative() { -1 } else { 1 };
            blocks.push((k - 1, k, &a * BigRational::from_integer(sgn.into())));
        }
    }
    // Disjointness of supports shows up as disjoint coordinate windows.
    let functional = TestFunctional::block_signs(blocks).map_err(|_| {
        FilterlabError::InvalidArgument("supports overlap; not a block system".into())
    })?;

    let pairing = ColumnPartition;
    let mut per_column = Vec::new();
    let mut records = Vec::new();
    let mut min_osc: Option<BigRational> = None;
    for col in 1..=columns.max(1) {
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        let mut inf_norm: Option<BigRational> = None;
        let mut pos = 1;
        loop {
            let n = pairing.column_element(col, pos);
            if n > horizon {
                break;
            }
            let x = seq.eval(n);
            if !x.is_zero() {
                let v = functional.apply(&x).value;
                lo = Some(match lo {
                    None => v.clone(),
                    Some(l) => l.min(v.clone()),
                });
                hi = Some(match hi {
                    None => v,
                    Some(h) => h.max(functional.apply(&x).value),
                });
                let norm = x.norm1().value;
                inf_norm = Some(match inf_norm {
                    None => norm,
                    Some(i) => i.min(norm),
                });
            }
            pos += 1;
        }
        if let (Some(lo), Some(hi), Some(inf)) = (lo, hi, inf_norm) {
            let osc = &hi - &lo;
            if rule == SignRule::AlternatingPerColumn {
                records.push(IneqRecord::new(
                    format!("column {col}: oscillation at least twice the norm infimum"),
                    &(BigRational::from_integer(2.into()) * inf),
                    Relation::Le,
                    &osc,
                ));
            }
            min_osc = Some(match min_osc {
                None => osc.clone(),
                Some(m) => m.min(osc.clone()),
            });
            per_column.push((col, format_rational(&hi), format_rational(&lo)));
        }
    }
    Ok((
        functional,
        OscillationReport {
            per_column,
            min_oscillation: min_osc
                .map(|m| format_rational(&m))
                .unwrap_or_else(|| "0".into()),
            records,
            horizon,
        },
    ))
}
