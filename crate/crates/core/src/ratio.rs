//! Exact rational scalars and the few numeric helpers the rest of the
//! crate leans on.
//!
//! All certificate arithmetic is arbitrary-precision rational. The one
//! irrational constant in the whole artifact, the Walsh scale factor
//! 1/√2, never appears as a number: values carrying it are compared on
//! their squares (see [`ScaledValue`]).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::str::FromStr;

/// Shorthand constructor: `rat(3, 4)` is 3/4.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand constructor for integers.
pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Canonical text form used in JSON certificates: `"p/q"`, or `"p"`
/// when the denominator is one.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses the canonical text form; accepts both `"p/q"` and `"p"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let num = BigInt::from_str(p.trim()).ok()?;
        let den = BigInt::from_str(q.trim()).ok()?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num, den))
    } else {
        let num = BigInt::from_str(s).ok()?;
        Some(BigRational::from_integer(num))
    }
}

/// A value `q · s` where `q` is rational and `s` is either 1 or 1/√2.
///
/// Sums of same-scale values stay in scale; mixed comparisons are done
/// on squared quantities, which are rational again.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledValue {
    pub value: BigRational,
    pub sqrt_half: bool,
}

impl ScaledValue {
    pub fn plain(value: BigRational) -> Self {
        ScaledValue {
            value,
            sqrt_half: false,
        }
    }

    pub fn scaled(value: BigRational) -> Self {
        ScaledValue {
            value,
            sqrt_half: true,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// The square, always rational: `q²` or `q²/2`.
    pub fn squared(&self) -> BigRational {
        let sq = &self.value * &self.value;
        if self.sqrt_half {
            sq / int(2)
        } else {
            sq
        }
    }

    /// Exact comparison of possibly differently-scaled magnitudes:
    /// signs first, then squares.
    pub fn cmp_exact(&self, other: &ScaledValue) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        let sa = sign(&self.value);
        let sb = sign(&other.value);
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let ord = self.squared().cmp(&other.squared());
        if sa > 0 {
            ord
        } else {
            ord.reverse()
        }
    }

    /// `|self| < r` for plain rational `r ≥ 0`, decided exactly.
    pub fn abs_lt(&self, r: &BigRational) -> bool {
        if r.is_negative() || r.is_zero() {
            return false;
        }
        self.squared() < r * r
    }
}

fn sign(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Exact sum accumulator for long streams of small rationals.
///
/// Keeps one integer bucket per denominator so a million-term Cesàro
/// sweep stays in machine integers; the final fold is exact.
#[derive(Debug, Default)]
pub struct ExactSum {
    buckets: BTreeMap<u64, i128>,
    overflow: BigRational,
}

impl ExactSum {
    pub fn new() -> Self {
        ExactSum {
            buckets: BTreeMap::new(),
            overflow: BigRational::zero(),
        }
    }

    pub fn add(&mut self, r: &BigRational) {
        use num_traits::ToPrimitive;
        let (num, den) = (r.numer().to_i128(), r.denom().to_u64());
        match (num, den) {
            (Some(n), Some(d)) => {
                let slot = self.buckets.entry(d).or_insert(0);
                match slot.checked_add(n) {
                    Some(v) => *slot = v,
                    None => self.overflow += r,
                }
            }
            _ => self.overflow += r,
        }
    }

    pub fn total(&self) -> BigRational {
        let mut acc = self.overflow.clone();
        for (&den, &num) in &self.buckets {
            acc += BigRational::new(BigInt::from(num), BigInt::from(den));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        for r in [rat(3, 4), rat(-7, 2), int(5), int(0), rat(22, 7)] {
            let s = format_rational(&r);
            assert_eq!(parse_rational(&s).unwrap(), r);
        }
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn scaled_comparisons_use_squares() {
        // √2 = 2·(1/√2): norm of a Walsh vector with two ±1 entries.
        let sqrt2 = ScaledValue::scaled(int(2));
        assert_eq!(sqrt2.squared(), int(2));
        // 1 < √2 < 3/2.
        assert_eq!(
            ScaledValue::plain(int(1)).cmp_exact(&sqrt2),
            std::cmp::Ordering::Less
        );
        assert_eq!(
            ScaledValue::plain(rat(3, 2)).cmp_exact(&sqrt2),
            std::cmp::Ordering::Greater
        );
        assert!(!sqrt2.abs_lt(&int(1)));
        assert!(sqrt2.abs_lt(&int(2)));
    }

    #[test]
    fn exact_sum_matches_naive_fold() {
        let mut acc = ExactSum::new();
        let mut naive = BigRational::zero();
        for k in 1..500i64 {
            let r = rat(if k % 3 == 0 { -k } else { k }, 1 + (k % 7));
            acc.add(&r);
            naive += r;
        }
        assert_eq!(acc.total(), naive);
    }
}
