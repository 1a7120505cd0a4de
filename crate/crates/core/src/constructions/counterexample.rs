//! Block counterexample builder: over a blocking witnessing the
//! failure of the block-respecting property, place scaled Walsh systems
//! on fresh coordinate windows, one row per block element. The result
//! converges to zero coordinate-wise, keeps squared norm 2 on the
//! covered indices, and carries a certificate that no dual-ball
//! functional exceeds ε on more than ⌈2/ε²⌉ indices per block.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::FilterlabError;
use crate::filters::witness::block_respecting_check;
use crate::filters::{FilterHandle, IneqRecord, Relation, Verdict};
use crate::l1seq::{user_defined, L1Vec, SeqGen};
use crate::ratio::format_rational;
use crate::setalg::{Blocking, SetExpr};

use super::walsh::WalshSystem;

/// One covered block: `members` get rows 1.. of a Walsh system of
/// dimension `dim` on the window `(offset, offset + 2^dim]`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BlockAssign {
    pub piece_index: u64,
    pub dim: u32,
    pub offset: u64,
    pub members: Vec<u64>,
    pub truncated: bool,
}

/// Per-block violation bound for dual-ball functionals, with the
/// validation table over seeded functionals.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WeakConvergenceCertificate {
    pub eps: String,
    /// `⌈2/ε²⌉`.
    pub d_max: u64,
    pub functional_count: u64,
    pub functional_period: u64,
    pub max_violations_observed: u64,
    /// Worst observed violation count per covered block.
    pub per_block_worst: Vec<(u64, u64)>,
    /// The derivation: any count `d` of indices with `f(x_n) ≥ ε`
    /// satisfies `ε·d ≤ f(Σ x_n) ≤ ‖Σ x_n‖ ≤ √(2d)`, recorded squared.
    pub derivation: Vec<IneqRecord>,
    pub blocks_covered: u64,
    pub truncated_blocks: Vec<u64>,
    pub coord_budget: u64,
    pub seed: u64,
}

impl WeakConvergenceCertificate {
    pub fn verify(&self) -> bool {
        let eps = match crate::ratio::parse_rational(&self.eps) {
            Some(e) if e > BigRational::zero() => e,
            _ => return false,
        };
        ceil_two_over_eps_squared(&eps) == self.d_max
            && self.max_violations_observed <= self.d_max
            && self
                .per_block_worst
                .iter()
                .all(|(_, v)| *v <= self.d_max)
            && self.derivation.iter().all(|r| r.holds() == Some(true))
    }
}

/// `⌈2/ε²⌉` exactly.
pub fn ceil_two_over_eps_squared(eps: &BigRational) -> u64 {
    use num_traits::ToPrimitive;
    let bound = BigRational::from_integer(2.into()) / (eps * eps);
    bound.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
}

#[derive(Debug, Clone)]
pub struct BlockCounterexample {
    pub seq: SeqGen,
    pub assignments: Vec<BlockAssign>,
    pub certificate: WeakConvergenceCertificate,
    /// The block-respecting refutation that licensed the construction.
    pub refutation: Verdict,
}

/// Builds the counterexample sequence over the refuted blocking.
///
/// Blocks are covered left to right while Walsh windows fit under the
/// coordinate budget; blocks wider than 16 are demoed on their first 16
/// elements (recorded as truncated, with the remaining indices mapped
/// to zero).
#[allow(clippy::too_many_arguments)]
pub fn build_block_counterexample(
    filter: &FilterHandle,
    stationary_set: &SetExpr,
    blocking: &Blocking,
    eps: &BigRational,
    coord_budget: u64,
    functional_samples: u64,
    horizon: u64,
    seed: u64,
) -> Result<BlockCounterexample, FilterlabError> {
    if eps <= &BigRational::zero() {
        return Err(FilterlabError::InvalidArgument("ε must be positive".into()));
    }
    let refutation = block_respecting_check(filter, stationary_set, blocking, horizon)?;
    if !refutation.is_refuted() {
        return Err(FilterlabError::precondition(
            "needs a refuted block-respecting check (bounded-selector certificate)",
            None,
        ));
    }

    // Assign Walsh rows block by block.
    let mut assignments: Vec<BlockAssign> = Vec::new();
    let mut offset = 0u64;
    for piece in blocking.pieces() {
        if offset >= coord_budget || piece.lo > horizon {
            break;
        }
        let members_all: Vec<u64> = (piece.lo..=piece.hi)
            .filter(|&v| blocking.ground().member(v) && stationary_set.member(v))
            .collect();
        if members_all.is_empty() {
            continue;
        }
        let dim = (members_all.len() as u32).min(super::walsh::MAX_DIM);
        let truncated = members_all.len() > dim as usize;
        let members: Vec<u64> = members_all.into_iter().take(dim as usize).collect();
        assignments.push(BlockAssign {
            piece_index: piece.index,
            dim,
            offset,
            members,
            truncated,
        });
        offset += 1u64 << dim;
    }
    if assignments.is_empty() {
        return Err(FilterlabError::InvalidArgument(
            "no block fits under the coordinate budget".into(),
        ));
    }

    // The sequence rule: x_n is the assigned Walsh row, zero elsewhere.
    let mut row_map: BTreeMap<u64, (u32, u64, u32)> = BTreeMap::new();
    for a in &assignments {
        for (i, &n) in a.members.iter().enumerate() {
            row_map.insert(n, (a.dim, a.offset, i as u32 + 1));
        }
    }
    let covered: Vec<u64> = row_map.keys().copied().collect();
    let rule_map = row_map.clone();
    let seq = {
        let mut s = user_defined(
            "walsh-counterexample",
            Arc::new(move |n| match rule_map.get(&n) {
                Some(&(dim, offset, row)) => WalshSystem { dim, offset }.vector(row),
                None => L1Vec::zero(),
            }),
        );
        // Squared norms equal 2 on the covered indices.
        s.norm_lower_on = Some((SetExpr::finite(covered), BigRational::from_integer(1.into())));
        s
    };

    // Validate the violation bound over seeded periodic functionals.
    let d_max = ceil_two_over_eps_squared(eps);
    let period = 64usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (p, q) = (eps.numer().clone(), eps.denom().clone());
    use num_traits::ToPrimitive;
    let p = p.to_i128().ok_or_else(|| {
        FilterlabError::InvalidArgument("ε numerator too large for the fast path".into())
    })?;
    let q = q.to_i128().ok_or_else(|| {
        FilterlabError::InvalidArgument("ε denominator too large for the fast path".into())
    })?;
    let mut per_block_worst: Vec<(u64, u64)> = assignments
        .iter()
        .map(|a| (a.piece_index, 0u64))
        .collect();
    let mut max_violations = 0u64;
    for _ in 0..functional_samples {
        let den: i64 = rng.gen_range(1..=8);
        let pattern: Vec<i64> = (0..period).map(|_| rng.gen_range(-den..=den)).collect();
        for (slot, a) in assignments.iter().enumerate() {
            let system = WalshSystem {
                dim: a.dim,
                offset: a.offset,
            };
            let mut violations = 0u64;
            for row in 1..=a.members.len() as u32 {
                // S = Σ_t sign(row, t) · pattern[(offset + t) mod P].
                let mut s: i128 = 0;
                for t in 0..system.block_len() {
                    let f = pattern[((a.offset + t) % period as u64) as usize] as i128;
                    s += system.sign(row, t) as i128 * f;
                }
                // f(x) ≥ ε ⟺ S > 0 and S²q² ≥ p²·den²·2^(2d−1).
                if s > 0 {
                    let lhs = s * s * q * q;
                    let rhs = p * p * (den as i128) * (den as i128) * (1i128 << (2 * a.dim - 1));
                    if lhs >= rhs {
                        violations += 1;
                    }
                }
            }
            per_block_worst[slot].1 = per_block_worst[slot].1.max(violations);
            max_violations = max_violations.max(violations);
        }
    }

    // Derivation records, instantiated at the bound: d ≤ 2/ε², so
    // ε²·d_max ≤ 2 while ε²·(d_max + 1) > 2 pins the ceiling.
    let eps_sq = eps * eps;
    let derivation = vec![
        IneqRecord::new(
            "any violating count d satisfies ε²·d² ≤ ‖Σ‖² ≤ 2d, so ε²·d ≤ 2; at d_max",
            &(eps_sq.clone() * BigRational::from_integer(d_max.into())),
            Relation::Le,
            &BigRational::from_integer(2.into()),
        ),
        IneqRecord::new(
            "minimality of the ceiling: ε²·(d_max + 1) > 2",
            &(eps_sq * BigRational::from_integer((d_max + 1).into())),
            Relation::Gt,
            &BigRational::from_integer(2.into()),
        ),
    ];

    let truncated_blocks: Vec<u64> = assignments
        .iter()
        .filter(|a| a.truncated)
        .map(|a| a.piece_index)
        .collect();
    let certificate = WeakConvergenceCertificate {
        eps: format_rational(eps),
        d_max,
        functional_count: functional_samples,
        functional_period: period as u64,
        max_violations_observed: max_violations,
        per_block_worst,
        derivation,
        blocks_covered: assignments.len() as u64,
        truncated_blocks,
        coord_budget,
        seed,
    };
    Ok(BlockCounterexample {
        seq,
        assignments,
        certificate,
        refutation,
    })
}

/// Structural coordinate-wise nullity: each coordinate is touched by at
/// most one block's vectors (the windows are fresh), and those form a
/// finite set of indices.
pub fn coordinatewise_null_check(cx: &BlockCounterexample) -> bool {
    let mut seen_windows: Vec<(u64, u64)> = cx
        .assignments
        .iter()
        .map(|a| (a.offset, a.offset + (1u64 << a.dim)))
        .collect();
    seen_windows.sort_unstable();
    let disjoint = seen_windows.windows(2).all(|w| w[0].1 <= w[1].0);
    let finite_touch = cx.assignments.iter().all(|a| !a.members.is_empty());
    disjoint && finite_touch
}

/// Exact check of the almost-Euclidean bounds on one assigned block:
/// for the given rational coefficients over the block's members,
/// `Σa² ≤ ‖Σ a_n x_n‖² ≤ 2·Σa²`.
pub fn dvoretzky_bounds_on_block(
    assign: &BlockAssign,
    coeffs: &[BigRational],
) -> Result<(BigRational, BigRational, BigRational), FilterlabError> {
    if coeffs.len() != assign.members.len() {
        return Err(FilterlabError::InvalidArgument(
            "one coefficient per block member".into(),
        ));
    }
    let system = WalshSystem {
        dim: assign.dim,
        offset: assign.offset,
    };
    let mut combo = L1Vec::zero();
    for (row, a) in coeffs.iter().enumerate() {
        combo = combo.add(&system.vector(row as u32 + 1).scale(a))?;
    }
    let norm_sq = combo.norm1_squared();
    let sum_sq: BigRational = coeffs.iter().map(|a| a * a).fold(BigRational::zero(), |x, y| x + y);
    Ok((
        sum_sq.clone(),
        norm_sq,
        BigRational::from_integer(2.into()) * sum_sq,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{int, rat};

    #[test]
    fn statistical_dyadic_counterexample() {
        let cx = build_block_counterexample(
            &FilterHandle::Statistical,
            &SetExpr::naturals(),
            &Blocking::Dyadic,
            &rat(1, 2),
            1 << 10,
            40,
            1 << 12,
            99,
        )
        .unwrap();
        assert_eq!(cx.certificate.d_max, 8);
        assert!(cx.certificate.max_violations_observed <= 8);
        assert!(cx.certificate.verify());
        assert!(coordinatewise_null_check(&cx));
        // Covered indices carry squared norm 2; uncovered are zero.
        let covered = cx.assignments[2].members[0];
        assert_eq!(cx.seq.eval(covered).norm1_squared(), int(2));
        // The almost-Euclidean bounds hold on a block with mixed signs.
        let assign = cx
            .assignments
            .iter()
            .find(|a| a.members.len() >= 4)
            .unwrap();
        let coeffs: Vec<BigRational> = (0..assign.members.len())
            .map(|i| if i % 2 == 0 { rat(1, 3) } else { rat(-2, 5) })
            .collect();
        let (lo, mid, hi) = dvoretzky_bounds_on_block(assign, &coeffs).unwrap();
        assert!(lo <= mid && mid <= hi, "{lo} ≤ {mid} ≤ {hi} violated");
    }

    #[test]
    fn eps_one_gives_dmax_two() {
        assert_eq!(ceil_two_over_eps_squared(&int(1)), 2);
        assert_eq!(ceil_two_over_eps_squared(&rat(1, 2)), 8);
        assert_eq!(ceil_two_over_eps_squared(&rat(2, 3)), 5); // 2/(4/9) = 4.5
    }

    #[test]
    fn frechet_blocking_rejected() {
        let err = build_block_counterexample(
            &FilterHandle::Frechet,
            &SetExpr::naturals(),
            &Blocking::Dyadic,
            &rat(1, 2),
            1 << 10,
            10,
            1 << 12,
            0,
        )
        .unwrap_err();
        assert!(matches!(err, FilterlabError::Precondition { .. }));
    }
}
