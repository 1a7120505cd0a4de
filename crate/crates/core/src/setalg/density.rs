//! Natural density: exact for eventually periodic normal forms,
//! horizon-bounded empirical estimates otherwise.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::expr::SetExpr;

/// Density answer. `exact` reports whether `value` is the true limit
/// `lim |A ∩ [1,n]| / n`; otherwise `upper` and `lower` carry sampled
/// envelope estimates at checkpoints up to the horizon and no claim is
/// made beyond it.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub value: Option<BigRational>,
    pub upper: Vec<(u64, BigRational)>,
    pub lower: Vec<(u64, BigRational)>,
    pub exact: bool,
    pub horizon: u64,
}

impl DensityReport {
    /// Largest sampled ratio (the best available upper estimate).
    pub fn upper_estimate(&self) -> Option<&BigRational> {
        self.upper.last().map(|(_, r)| r)
    }

    pub fn lower_estimate(&self) -> Option<&BigRational> {
        self.lower.last().map(|(_, r)| r)
    }
}

pub fn density(set: &SetExpr, horizon: u64) -> DensityReport {
    let horizon = horizon.max(1);
    if let Some(ep) = set.normalize() {
        let value = ep.density();
        return DensityReport {
            value: Some(value.clone()),
            upper: vec![(horizon, value.clone())],
            lower: vec![(horizon, value)],
            exact: true,
            horizon,
        };
    }
    let mut checkpoints: Vec<u64> = vec![horizon / 8, horizon / 4, horizon / 2, horizon];
    checkpoints.retain(|&c| c >= 1);
    checkpoints.dedup();
    let ratios: Vec<(u64, BigRational)> = checkpoints
        .iter()
        .map(|&c| {
            (
                c,
                BigRational::new(BigInt::from(set.counting(c)), BigInt::from(c)),
            )
        })
        .collect();
    // Envelopes over the observed suffix: best upper/lower estimates
    // seen from each checkpoint on.
    let mut upper = ratios.clone();
    let mut lower = ratios;
    for i in (0..upper.len().saturating_sub(1)).rev() {
        if upper[i].1 < upper[i + 1].1 {
            let v = upper[i + 1].1.clone();
            upper[i].1 = v;
        }
        if lower[i].1 > lower[i + 1].1 {
            let v = lower[i + 1].1.clone();
            lower[i].1 = v;
        }
    }
    DensityReport {
        value: None,
        upper,
        lower,
        exact: false,
        horizon,
    }
}
