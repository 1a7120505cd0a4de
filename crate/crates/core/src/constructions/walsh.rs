//! Exact Walsh block systems.
//!
//! The `d` bit-sign rows of the order-2^d Walsh matrix span an
//! almost-Euclidean section of ℓ₁ on a coordinate block of length 2^d:
//! scaled by √2/2^d, the span satisfies
//!
//! ```text
//!   (Σ|a_n|²)^{1/2} ≤ ‖Σ a_n x_n‖₁ ≤ (2 Σ|a_n|²)^{1/2}
//! ```
//!
//! with both constants attained. All comparisons run on squared
//! integer quantities: writing S(a) = Σ_σ |⟨a, σ⟩| over all 2^d sign
//! patterns, the bounds are `2^(2d−1)·Σa² ≤ S(a)² ≤ 2^(2d)·Σa²`.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::FilterlabError;
use crate::filters::{IneqRecord, Relation};
use crate::l1seq::L1Vec;
use crate::ratio::int;

/// Hard cap on the block exponent: a block of length 2^d must stay
/// inside the sparse-vector budget.
pub const MAX_DIM: u32 = 16;

/// `d` rows of the order-2^d Walsh matrix on the coordinate window
/// `(offset, offset + 2^d]`, with declared scale √2/2^d (stored as the
/// rational 2^(1−d) times the symbolic 1/√2 flag).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalshSystem {
    pub dim: u32,
    pub offset: u64,
}

impl WalshSystem {
    pub fn new(dim: u32, offset: u64) -> Result<WalshSystem, FilterlabError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(FilterlabError::InvalidArgument(format!(
                "walsh dimension must lie in 1..={MAX_DIM}, got {dim}"
            )));
        }
        Ok(WalshSystem { dim, offset })
    }

    pub fn block_len(&self) -> u64 {
        1 << self.dim
    }

    /// Sign of row `row` (1-based) at block position `t ∈ [0, 2^d)`.
    pub fn sign(&self, row: u32, t: u64) -> i64 {
        debug_assert!(row >= 1 && row <= self.dim);
        if t & (1 << (row - 1)) == 0 {
            1
        } else {
            -1
        }
    }

    /// The `row`-th scaled vector: entries ±2^(1−d) carrying the 1/√2
    /// flag, so the squared ℓ₁ norm is exactly 2.
    pub fn vector(&self, row: u32) -> L1Vec {
        let scale = BigRational::new(BigInt::from(2), BigInt::from(1u64 << self.dim));
        let coords = (0..self.block_len()).map(|t| {
            (
                self.offset + t + 1,
                &scale * BigRational::from_integer(self.sign(row, t).into()),
            )
        });
        L1Vec::from_coords(coords).with_sqrt_half_scale(true)
    }
}

/// `S(b)² = (Σ_{σ∈{±1}^d} |⟨b, σ⟩|)²` for an integer coefficient
/// vector, via a Gray-code walk over all sign patterns.
pub fn khintchine_sum(b: &[i64]) -> i128 {
    let d = b.len();
    assert!(d >= 1 && d <= MAX_DIM as usize);
    let mut signs = vec![1i64; d];
    let mut dot: i128 = b.iter().map(|&x| x as i128).sum();
    let mut total: i128 = dot.abs();
    for t in 1u64..(1 << d) {
        let flip = t.trailing_zeros() as usize;
        // Flipping sign s on coefficient b_j changes the dot by -2·s·b_j.
        dot -= 2 * signs[flip] as i128 * b[flip] as i128;
        signs[flip] = -signs[flip];
        total += dot.abs();
    }
    total
}

/// Verification report for the squared Khintchine bounds.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WalshReport {
    pub dim: u32,
    pub samples: u64,
    pub violations: u64,
    /// Extremal cases: all-ones attains the lower bound, a unit vector
    /// the upper.
    pub extremal: Vec<IneqRecord>,
    pub seed: u64,
}

impl WalshReport {
    /// Independent re-check: every recorded inequality must replay.
    pub fn verify(&self) -> bool {
        self.violations == 0 && self.extremal.iter().all(|r| r.holds() == Some(true))
    }
}

/// Builds the system and verifies the squared bounds on `samples`
/// seeded rational coefficient vectors plus the two extremal cases.
pub fn walsh_system(
    dim: u32,
    samples: u64,
    seed: u64,
) -> Result<(WalshSystem, WalshReport), FilterlabError> {
    let system = WalshSystem::new(dim, 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ u64::from(dim));
    let d = dim as usize;
    let mut violations = 0u64;
    for _ in 0..samples {
        // Rational coefficients with a shared denominator: scaling a
        // vector scales both sides of the bounds by the square, so
        // integer numerators decide the comparison exactly.
        let den: i64 = rng.gen_range(1..=12);
        let b: Vec<i64> = (0..d).map(|_| rng.gen_range(-99..=99) * den).collect();
        if !bounds_hold(&b) {
            violations += 1;
        }
    }
    let all_ones = vec![1i64; d];
    let mut unit = vec![0i64; d];
    unit[0] = 1;
    let lower_case = khintchine_sum(&all_ones);
    let upper_case = khintchine_sum(&unit);
    let pow = |e: u32| BigRational::from_integer(BigInt::from(1u128) << e);
    let square = |s: i128| BigRational::from_integer(BigInt::from(s) * BigInt::from(s));
    let mut extremal = vec![
        IneqRecord::new(
            "lower bound at the all-ones vector: 2^(2d-1)·d ≤ S²",
            &(pow(2 * dim - 1) * int(d as i64)),
            Relation::Le,
            &square(lower_case),
        ),
        IneqRecord::new(
            "upper bound attained at a unit vector: S² = 2^(2d)",
            &square(upper_case),
            Relation::Eq,
            &pow(2 * dim),
        ),
    ];
    if dim == 2 {
        // Both constants are tight in dimension two: the all-ones
        // vector attains the lower bound exactly (16 = 16).
        extremal.push(IneqRecord::new(
            "lower bound attained at (1,1): 2^3·2 = S² = 16",
            &(pow(3) * int(2)),
            Relation::Eq,
            &square(lower_case),
        ));
    }
    Ok((
        system,
        WalshReport {
            dim,
            samples,
            violations,
            extremal,
            seed,
        },
    ))
}

/// `2^(2d−1)·Σb² ≤ S(b)² ≤ 2^(2d)·Σb²`, decided in exact integers.
pub fn bounds_hold(b: &[i64]) -> bool {
    let d = b.len() as u32;
    let s = khintchine_sum(b);
    let s2 = BigInt::from(s) * BigInt::from(s);
    let sumsq: i128 = b.iter().map(|&x| (x as i128) * (x as i128)).sum();
    let sumsq = BigInt::from(sumsq);
    let lower = (BigInt::from(1) << (2 * d - 1)) * &sumsq;
    let upper = (BigInt::from(1) << (2 * d)) * &sumsq;
    lower <= s2 && s2 <= upper
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    #[test]
    fn dimension_guard() {
        assert!(WalshSystem::new(0, 0).is_err());
        assert!(WalshSystem::new(17, 0).is_err());
        assert!(WalshSystem::new(16, 0).is_ok());
    }

    #[test]
    fn d1_bounds() {
        // S = 2|a₁|, so S² = 4a₁² sits between 2a₁² and 4a₁².
        assert_eq!(khintchine_sum(&[3]), 6);
        assert!(bounds_hold(&[3]));
        assert!(bounds_hold(&[-7]));
    }

    #[test]
    fn d2_tight_cases() {
        // a = (1,1): Σ_σ|⟨a,σ⟩| = 2+0+0+2 = 4, squared 16 = 2^3·2.
        assert_eq!(khintchine_sum(&[1, 1]), 4);
        // a = (1,0): Σ = 4, squared 16 = 2^4·1.
        assert_eq!(khintchine_sum(&[1, 0]), 4);
        let (_, report) = walsh_system(2, 100, 7).unwrap();
        assert!(report.verify());
    }

    #[test]
    fn d2_closed_form() {
        // S(a,b) = 2(|a+b| + |a−b|).
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a: i64 = rng.gen_range(-50..=50);
            let b: i64 = rng.gen_range(-50..=50);
            let closed = 2 * ((a + b).abs() + (a - b).abs()) as i128;
            assert_eq!(khintchine_sum(&[a, b]), closed);
        }
    }

    #[test]
    fn scaled_vectors_have_norm_sqrt2() {
        let system = WalshSystem::new(3, 10).unwrap();
        for row in 1..=3 {
            let v = system.vector(row);
            assert!(v.scale_sqrt_half());
            assert_eq!(v.norm1_squared(), rat(2, 1));
            assert_eq!(v.support_len(), 8);
            assert_eq!(v.support().next(), Some(11));
        }
    }

    #[test]
    fn sampled_bounds_hold_for_all_dims() {
        for d in 1..=8 {
            let (_, report) = walsh_system(d, 50, 42).unwrap();
            assert!(report.verify(), "violation at d={d}");
        }
    }

    #[test]
    fn gray_walk_matches_brute_force() {
        let b = [5i64, -3, 2, 7];
        let mut brute: i128 = 0;
        for mask in 0u64..16 {
            let mut dot: i128 = 0;
            for (j, &x) in b.iter().enumerate() {
                let sign = if mask & (1 << j) == 0 { 1 } else { -1 };
                dot += sign * x as i128;
            }
            brute += dot.abs();
        }
        assert_eq!(khintchine_sum(&b), brute);
    }
}
