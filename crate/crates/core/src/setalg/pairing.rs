//! The fixed diagonal pairing ℕ ↔ ℕ×ℕ and the column partition it
//! induces.
//!
//! Natural numbers are enumerated along anti-diagonals:
//! 1 ↦ (1,1), 2 ↦ (1,2), 3 ↦ (2,1), 4 ↦ (1,3), 5 ↦ (2,2), 6 ↦ (3,1), …
//! Column `m` is the set `D_m = {n : col(n) = m}`; the row index of a
//! value doubles as its 1-based position within its column, because
//! for fixed `m` the value `(k+m-2)(k+m-1)/2 + k` is strictly
//! increasing in `k`. Columns are pairwise disjoint, infinite, and
//! cover ℕ.

/// The fixed cantor-diagonal column partition. A unit type: there is
/// exactly one pairing in the artifact, so handles need no state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ColumnPartition;

impl ColumnPartition {
    pub const NAME: &'static str = "cantor-diagonal";

    /// `(row, col)` of a value `n ≥ 1`.
    pub fn pair_of(self, n: u64) -> (u64, u64) {
        debug_assert!(n >= 1);
        // Anti-diagonal d contains values (d-1)d/2 + 1 ..= d(d+1)/2.
        let d = diagonal_of(n);
        let row = n - (d - 1) * d / 2;
        let col = d - row + 1;
        (row, col)
    }

    pub fn index_of(self, row: u64, col: u64) -> u64 {
        debug_assert!(row >= 1 && col >= 1);
        let d = row + col - 1;
        (d - 1) * d / 2 + row
    }

    pub fn column_of(self, n: u64) -> u64 {
        self.pair_of(n).1
    }

    /// Position of `n` within its column (1-based).
    pub fn position_of(self, n: u64) -> u64 {
        self.pair_of(n).0
    }

    /// The `k`-th element of column `m`, `k ≥ 1`.
    pub fn column_element(self, col: u64, k: u64) -> u64 {
        self.index_of(k, col)
    }

    /// How many elements of column `m` lie in `[1, n]`.
    pub fn column_count_upto(self, col: u64, n: u64) -> u64 {
        if n == 0 || self.column_element(col, 1) > n {
            return 0;
        }
        let mut lo = 1u64;
        let mut hi = 1u64;
        while self.column_element(col, hi) <= n {
            lo = hi;
            hi *= 2;
        }
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if self.column_element(col, mid) <= n {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    }

    /// Largest column index with any element in `[1, n]` (the number
    /// of columns touched by the initial segment).
    pub fn columns_touched_upto(self, n: u64) -> u64 {
        if n == 0 {
            return 0;
        }
        diagonal_of(n)
    }
}

fn diagonal_of(n: u64) -> u64 {
    // Largest d with (d-1)d/2 < n, via integer sqrt then adjustment.
    let approx = (((8u128 * n as u128 + 1) as f64).sqrt() as u64).saturating_sub(2) / 2;
    let mut d = approx.max(1);
    while d * (d + 1) / 2 < n {
        d += 1;
    }
    while d > 1 && (d - 1) * d / 2 >= n {
        d -= 1;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: ColumnPartition = ColumnPartition;

    #[test]
    fn enumeration_prefix() {
        let expect = [
            (1, 1),
            (1, 2),
            (2, 1),
            (1, 3),
            (2, 2),
            (3, 1),
            (1, 4),
            (2, 3),
            (3, 2),
            (4, 1),
        ];
        for (i, &pair) in expect.iter().enumerate() {
            assert_eq!(P.pair_of(i as u64 + 1), pair);
        }
    }

    #[test]
    fn bijective_up_to_1e5() {
        for n in 1..=100_000u64 {
            let (r, c) = P.pair_of(n);
            assert_eq!(P.index_of(r, c), n);
        }
    }

    #[test]
    fn column_one_is_triangular_numbers() {
        for k in 1..100u64 {
            assert_eq!(P.column_element(1, k), k * (k + 1) / 2);
        }
    }

    #[test]
    fn columns_partition() {
        use std::collections::BTreeSet;
        let mut seen = BTreeSet::new();
        for col in 1..=450u64 {
            let mut k = 1;
            loop {
                let v = P.column_element(col, k);
                if v > 100_000 {
                    break;
                }
                assert!(seen.insert(v), "value {v} appeared twice");
                k += 1;
            }
        }
        assert_eq!(seen.len(), 100_000);
        assert_eq!(seen.iter().next_back(), Some(&100_000));
    }

    #[test]
    fn column_count_matches_enumeration() {
        for col in [1u64, 2, 3, 10, 37] {
            let mut count = 0;
            for n in 1..=5_000u64 {
                if P.column_of(n) == col {
                    count += 1;
                }
                assert_eq!(P.column_count_upto(col, n), count, "col={col} n={n}");
            }
        }
    }
}
