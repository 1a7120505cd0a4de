//! Closed algebra of finitely-describable subsets of ℕ = {1, 2, ...}:
//! exact membership, counting, natural-density analysis, blockings,
//! and the fixed column partition.

pub mod analysis;
pub mod blocking;
pub mod density;
pub mod ep;
pub mod expr;
pub mod json;
pub mod pairing;

pub use analysis::{column_analysis, ColumnAnalysis};
pub use blocking::{Blocking, Choice, Piece};
pub use density::{density, DensityReport};
pub use ep::{BoolOp, EpSet, TrueEnum};
pub use expr::{ColumnRule, ColumnSelector, ColumnSet, SetExpr};
pub use pairing::ColumnPartition;

/// What is known structurally about the size of a set and of its
/// complement; `None` entries mean the analysis could not decide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CardInfo {
    pub infinite: Option<bool>,
    pub coinfinite: Option<bool>,
}

/// Structural cardinality analysis. Exact on the eventually periodic
/// fragment and on the column-set fragment; conservative elsewhere.
pub fn cardinality(set: &SetExpr) -> CardInfo {
    if let Some(ep) = set.normalize() {
        return CardInfo {
            infinite: Some(!ep.is_finite()),
            coinfinite: Some(!ep.is_cofinite()),
        };
    }
    if let Some(analysis) = column_analysis(set) {
        return CardInfo {
            infinite: Some(analysis.is_infinite()),
            coinfinite: Some(analysis.complement().is_infinite()),
        };
    }
    match set {
        SetExpr::Selector { blocking, .. } => {
            // One element per piece of an infinite blocking.
            let coinfinite = match &**blocking {
                Blocking::Dyadic => Some(true),
                Blocking::Explicit { .. } => Some(false),
                Blocking::Derived { ground, .. } => cardinality(ground).coinfinite,
                Blocking::DerivedDyadic { .. } => None,
            };
            CardInfo {
                infinite: Some(true),
                coinfinite,
            }
        }
        SetExpr::Compl(inner) => {
            let c = cardinality(inner);
            CardInfo {
                infinite: c.coinfinite,
                coinfinite: c.infinite,
            }
        }
        SetExpr::Union(parts) => {
            let cards: Vec<CardInfo> = parts.iter().map(cardinality).collect();
            let infinite = if cards.iter().any(|c| c.infinite == Some(true)) {
                Some(true)
            } else if cards.iter().all(|c| c.infinite == Some(false)) {
                Some(false)
            } else {
                None
            };
            let coinfinite = if cards.iter().any(|c| c.coinfinite == Some(false)) {
                Some(false)
            } else {
                None
            };
            CardInfo {
                infinite,
                coinfinite,
            }
        }
        SetExpr::Inter(parts) => {
            let cards: Vec<CardInfo> = parts.iter().map(cardinality).collect();
            let infinite = if cards.iter().any(|c| c.infinite == Some(false)) {
                Some(false)
            } else {
                None
            };
            let coinfinite = if cards.iter().any(|c| c.coinfinite == Some(true)) {
                Some(true)
            } else {
                None
            };
            CardInfo {
                infinite,
                coinfinite,
            }
        }
        SetExpr::Diff(a, b) => {
            let ca = cardinality(a);
            let cb = cardinality(b);
            let infinite = match (ca.infinite, cb.infinite) {
                (Some(true), Some(false)) => Some(true),
                (Some(false), _) => Some(false),
                _ => None,
            };
            CardInfo {
                infinite,
                coinfinite: if cb.infinite == Some(true) {
                    Some(true)
                } else {
                    ca.coinfinite
                },
            }
        }
        _ => CardInfo {
            infinite: None,
            coinfinite: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinality_on_ep_fragment() {
        let c = cardinality(&SetExpr::ap(0, 2));
        assert_eq!(c.infinite, Some(true));
        assert_eq!(c.coinfinite, Some(true));
        let c = cardinality(&SetExpr::finite([1, 2]));
        assert_eq!(c.infinite, Some(false));
        assert_eq!(c.coinfinite, Some(true));
        let c = cardinality(&SetExpr::finite([7]).compl());
        assert_eq!(c.infinite, Some(true));
        assert_eq!(c.coinfinite, Some(false));
    }

    #[test]
    fn cardinality_of_columns_and_selectors() {
        let c = cardinality(&SetExpr::column(4));
        assert_eq!(c.infinite, Some(true));
        assert_eq!(c.coinfinite, Some(true));

        let sel = SetExpr::Selector {
            blocking: Box::new(Blocking::Dyadic),
            choice: Choice::Min,
        };
        let c = cardinality(&sel);
        assert_eq!(c.infinite, Some(true));
        assert_eq!(c.coinfinite, Some(true));
        let c = cardinality(&sel.compl());
        assert_eq!(c.infinite, Some(true));
    }
}
