//! Block-basis perturbation equivalence: vectors that are small
//! perturbations of a disjointly supported system are equivalent to the
//! scaled canonical basis, with lower constant c₁ = 1 − ε/ε₀.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::FilterlabError;
use crate::filters::{IneqRecord, Relation};
use crate::l1seq::L1Vec;
use crate::ratio::format_rational;

/// Result of a perturbation-equivalence check over seeded coefficient
/// vectors: `c₁·Σ|a_n|·‖y_n‖ ≤ ‖Σ a_n y_n‖ ≤ Σ|a_n|·‖y_n‖`, exact.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PerturbationReport {
    pub c1: String,
    pub eps: String,
    pub eps0: String,
    pub samples: u64,
    pub violations: u64,
    /// Smallest observed ratio ‖Σ a y‖ / Σ|a|‖y‖.
    pub worst_ratio: String,
    /// First sampled instantiations, replayable by the checker.
    pub records: Vec<IneqRecord>,
    /// The vectors, embedded for independent re-evaluation.
    pub vectors: Vec<serde_json::Value>,
    pub blocks: Vec<(u64, u64)>,
    pub seed: u64,
}

impl PerturbationReport {
    /// Replays the sampled records and the recorded constant; an
    /// independent checker calls this without re-running the search.
    pub fn verify(&self) -> bool {
        self.violations == 0 && self.records.iter().all(|r| r.holds() == Some(true))
    }
}

/// Exact perturbation check. Preconditions (strict, rejected with the
/// offending index):
/// * every `‖y_n‖ ≥ ε₀ > ε > 0`,
/// * the coordinate windows are pairwise disjoint and in order,
/// * `‖y_n − z_n‖ < ε/2` strictly, with `z_n` the restriction of `y_n`
///   to its window.
pub fn perturbation_check(
    ys: &[L1Vec],
    blocks: &[(u64, u64)],
    eps: &BigRational,
    eps0: &BigRational,
    samples: u64,
    seed: u64,
) -> Result<PerturbationReport, FilterlabError> {
    if ys.is_empty() || ys.len() != blocks.len() {
        return Err(FilterlabError::InvalidArgument(
            "need equally many vectors and coordinate windows".into(),
        ));
    }
    if !(eps > &BigRational::zero() && eps0 > eps) {
        return Err(FilterlabError::InvalidArgument(
            "need ε₀ > ε > 0".into(),
        ));
    }
    for w in blocks.windows(2) {
        if w[0].1 > w[1].0 {
            return Err(FilterlabError::InvalidArgument(
                "coordinate windows must be disjoint and increasing".into(),
            ));
        }
    }
    let half_eps = eps / BigRational::from_integer(2.into());
    for (idx, (y, &(lo, hi))) in ys.iter().zip(blocks).enumerate() {
        if y.scale_sqrt_half() {
            return Err(FilterlabError::InvalidArgument(
                "perturbation checks run on unscaled vectors".into(),
            ));
        }
        let norm = y.norm1().value;
        if norm < *eps0 {
            return Err(FilterlabError::precondition(
                format!(
                    "‖y‖ = {} under the declared ε₀ = {}",
                    format_rational(&norm),
                    format_rational(eps0)
                ),
                Some(idx as u64),
            ));
        }
        let z = y.restrict_window(lo, hi);
        let defect = y.sub(&z).expect("same scale").norm1().value;
        if defect >= half_eps {
            return Err(FilterlabError::precondition(
                format!(
                    "‖y − z‖ = {} is not strictly below ε/2 = {}",
                    format_rational(&defect),
                    format_rational(&half_eps)
                ),
                Some(idx as u64),
            ));
        }
    }

    let c1 = BigRational::one() - eps / eps0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0u64;
    let mut worst: Option<BigRational> = None;
    let mut records = Vec::new();
    for s in 0..samples {
        let coeffs: Vec<BigRational> = (0..ys.len())
            .map(|_| {
                let num: i64 = rng.gen_range(-9..=9);
                let den: i64 = rng.gen_range(1..=8);
                BigRational::new(num.into(), den.into())
            })
            .collect();
        if coeffs.iter().all(|a| a.is_zero()) {
            continue;
        }
        let mut combo = L1Vec::zero();
        let mut weighted = BigRational::zero();
        for (a, y) in coeffs.iter().zip(ys) {
            combo = combo.add(&y.scale(a)).expect("same scale");
            weighted += a.abs() * y.norm1().value;
        }
        let lhs = combo.norm1().value;
        let lower = &c1 * &weighted;
        if !(lower <= lhs && lhs <= weighted) {
            violations += 1;
        }
        let ratio = &lhs / &weighted;
        if worst.as_ref().map_or(true, |w| ratio < *w) {
            worst = Some(ratio);
        }
        if s < 5 {
            records.push(IneqRecord::new(
                format!("sample {s}: c₁·Σ|a|‖y‖ ≤ ‖Σ a y‖"),
                &lower,
                Relation::Le,
                &lhs,
            ));
            records.push(IneqRecord::new(
                format!("sample {s}: ‖Σ a y‖ ≤ Σ|a|‖y‖"),
                &lhs,
                Relation::Le,
                &weighted,
            ));
        }
    }
    Ok(PerturbationReport {
        c1: format_rational(&c1),
        eps: format_rational(eps),
        eps0: format_rational(eps0),
        samples,
        violations,
        worst_ratio: worst.map(|w| format_rational(&w)).unwrap_or_else(|| "1".into()),
        records,
        vectors: ys.iter().map(|y| y.to_json()).collect(),
        blocks: blocks.to_vec(),
        seed,
    })
}
