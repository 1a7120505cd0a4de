//! Blockings: disjoint partitions of an infinite ground set into
//! non-empty finite pieces.

use super::expr::SetExpr;
use crate::error::FilterlabError;

/// Choice rule of a selector set: one designated element per piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    Min,
    Max,
}

/// The supported blocking shapes.
///
/// The dyadic blocking is canonicalized as `D_k = {2^(k-1), …, 2^k − 1}`
/// for `k ≥ 1`: consecutive half-open dyadic intervals, adjusted so the
/// pieces are disjoint, cover all of ℕ starting at 1, and have the same
/// exponential growth as the textbook `(2^k − 1, 2^(k+1)]` blocks whose
/// written endpoints overlap.
#[derive(Debug, Clone, PartialEq)]
pub enum Blocking {
    Dyadic,
    /// Pieces `(0, b_1], (b_1, b_2], …` then singletons past the last
    /// boundary.
    Explicit { boundaries: Vec<u64> },
    /// Pieces `ground ∩ (c_{i-1}, c_i]` (empty cuts skipped), then
    /// singletons of the ground set past the last cut.
    Derived { ground: Box<SetExpr>, cuts: Vec<u64> },
    /// Dyadic value windows intersected with a ground set, empty
    /// windows skipped.
    DerivedDyadic { ground: Box<SetExpr> },
}

/// One piece produced by [`Blocking::pieces`]: its 1-based index after
/// empty-piece skipping and the value window `[lo, hi]` it occupies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub index: u64,
    pub lo: u64,
    pub hi: u64,
}

impl Blocking {
    pub fn dyadic() -> Blocking {
        Blocking::Dyadic
    }

    pub fn explicit(boundaries: Vec<u64>) -> Result<Blocking, FilterlabError> {
        let b = Blocking::Explicit { boundaries };
        b.validate()?;
        Ok(b)
    }

    pub fn derived(ground: SetExpr, cuts: Vec<u64>) -> Result<Blocking, FilterlabError> {
        let b = Blocking::Derived {
            ground: Box::new(ground),
            cuts,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn derived_dyadic(ground: SetExpr) -> Result<Blocking, FilterlabError> {
        let b = Blocking::DerivedDyadic {
            ground: Box::new(ground),
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), FilterlabError> {
        let check_increasing = |bs: &[u64]| {
            if bs.iter().any(|&b| b == 0) || bs.windows(2).any(|w| w[0] >= w[1]) {
                Err(FilterlabError::InvalidBlocking(
                    "boundaries must be strictly increasing positive naturals".into(),
                ))
            } else {
                Ok(())
            }
        };
        match self {
            Blocking::Dyadic => Ok(()),
            Blocking::Explicit { boundaries } => check_increasing(boundaries),
            Blocking::Derived { ground, cuts } => {
                check_increasing(cuts)?;
                ensure_infinite(ground)
            }
            Blocking::DerivedDyadic { ground } => ensure_infinite(ground),
        }
    }

    /// The ground set being partitioned.
    pub fn ground(&self) -> SetExpr {
        match self {
            Blocking::Dyadic | Blocking::Explicit { .. } => SetExpr::naturals(),
            Blocking::Derived { ground, .. } | Blocking::DerivedDyadic { ground } => {
                (**ground).clone()
            }
        }
    }

    fn ground_member(&self, n: u64) -> bool {
        match self {
            Blocking::Dyadic | Blocking::Explicit { .. } => n >= 1,
            Blocking::Derived { ground, .. } | Blocking::DerivedDyadic { ground } => {
                ground.member(n)
            }
        }
    }

    /// Raw value windows before empty-piece skipping: window `i ≥ 1`.
    fn raw_window(&self, i: u64) -> (u64, u64) {
        match self {
            Blocking::Dyadic | Blocking::DerivedDyadic { .. } => (1u64 << (i - 1), (1u64 << i) - 1),
            Blocking::Explicit { boundaries } | Blocking::Derived { cuts: boundaries, .. } => {
                let k = boundaries.len() as u64;
                if i <= k {
                    let lo = if i == 1 {
                        1
                    } else {
                        boundaries[(i - 2) as usize] + 1
                    };
                    (lo, boundaries[(i - 1) as usize])
                } else {
                    let last = boundaries.last().copied().unwrap_or(0);
                    (last + i - k, last + i - k)
                }
            }
        }
    }

    fn window_nonempty(&self, lo: u64, hi: u64) -> bool {
        match self {
            Blocking::Dyadic | Blocking::Explicit { .. } => lo <= hi,
            Blocking::Derived { ground, .. } | Blocking::DerivedDyadic { ground } => {
                lo <= hi && ground.counting(hi) > ground.counting(lo - 1)
            }
        }
    }

    /// Iterator over the non-empty pieces, in order, with reindexing.
    pub fn pieces(&self) -> PieceIter<'_> {
        PieceIter {
            blocking: self,
            raw: 0,
            index: 0,
        }
    }

    /// Piece index (after skipping) containing `n`, `None` when `n` is
    /// not a ground element.
    pub fn piece_index_of(&self, n: u64) -> Option<u64> {
        if n == 0 || !self.ground_member(n) {
            return None;
        }
        let raw = self.raw_index_for_value(n);
        if matches!(self, Blocking::Dyadic | Blocking::Explicit { .. }) {
            // Ground is ℕ, so no window is empty.
            return Some(raw);
        }
        // Count non-empty windows up to and including `raw`.
        let mut idx = 0;
        for i in 1..=raw {
            let (lo, hi) = self.raw_window(i);
            if self.window_nonempty(lo, hi) {
                idx += 1;
            }
        }
        Some(idx)
    }

    fn raw_index_for_value(&self, n: u64) -> u64 {
        match self {
            Blocking::Dyadic | Blocking::DerivedDyadic { .. } => 64 - n.leading_zeros() as u64,
            Blocking::Explicit { boundaries } | Blocking::Derived { cuts: boundaries, .. } => {
                let k = boundaries.len() as u64;
                let last = boundaries.last().copied().unwrap_or(0);
                if n > last {
                    k + (n - last)
                } else {
                    // First boundary ≥ n.
                    (boundaries.partition_point(|&b| b < n) + 1) as u64
                }
            }
        }
    }

    /// Elements of the piece with (reindexed) index `k`.
    pub fn piece_elems(&self, k: u64) -> Vec<u64> {
        for piece in self.pieces() {
            if piece.index == k {
                return (piece.lo..=piece.hi)
                    .filter(|&v| self.ground_member(v))
                    .collect();
            }
            if piece.index > k {
                break;
            }
        }
        Vec::new()
    }

    /// The chosen element of the piece occupying window `[lo, hi]`.
    fn chosen_in_window(&self, lo: u64, hi: u64, choice: Choice) -> Option<u64> {
        match choice {
            Choice::Min => (lo..=hi).find(|&v| self.ground_member(v)),
            Choice::Max => (lo..=hi).rev().find(|&v| self.ground_member(v)),
        }
    }

    /// Is `n` the chosen element of its piece?
    pub fn is_chosen(&self, n: u64, choice: Choice) -> bool {
        if n == 0 || !self.ground_member(n) {
            return false;
        }
        let raw = self.raw_index_for_value(n);
        let (lo, hi) = self.raw_window(raw);
        self.chosen_in_window(lo, hi, choice) == Some(n)
    }

    /// `|{chosen elements} ∩ [1, n]|`.
    pub fn count_chosen(&self, n: u64, choice: Choice) -> u64 {
        let mut count = 0;
        for piece in self.pieces() {
            if piece.lo > n {
                break;
            }
            if let Some(c) = self.chosen_in_window(piece.lo, piece.hi, choice) {
                if c <= n {
                    count += 1;
                }
            }
        }
        count
    }

    /// Number of pieces whose window meets `[1, n]`.
    pub fn pieces_meeting(&self, n: u64) -> u64 {
        let mut count = 0;
        for piece in self.pieces() {
            if piece.lo > n {
                break;
            }
            count += 1;
        }
        count
    }

    /// True for the blockings whose piece count against `[1, n]` is
    /// provably at most `log2(n) + 2` — the hypothesis of the
    /// zero-density argument against unit selectors.
    pub fn log_piece_growth(&self) -> bool {
        matches!(self, Blocking::Dyadic | Blocking::DerivedDyadic { .. })
    }
}

fn ensure_infinite(ground: &SetExpr) -> Result<(), FilterlabError> {
    match super::cardinality(ground).infinite {
        Some(true) => Ok(()),
        _ => Err(FilterlabError::InvalidBlocking(
            "derived blocking needs a ground set certified infinite".into(),
        )),
    }
}

pub struct PieceIter<'a> {
    blocking: &'a Blocking,
    raw: u64,
    index: u64,
}

impl Iterator for PieceIter<'_> {
    type Item = Piece;

    fn next(&mut self) -> Option<Piece> {
        loop {
            self.raw += 1;
            if self.raw > (1 << 62) {
                return None;
            }
            let (lo, hi) = self.blocking.raw_window(self.raw);
            if self.blocking.window_nonempty(lo, hi) {
                self.index += 1;
                return Some(Piece {
                    index: self.index,
                    lo,
                    hi,
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_pieces() {
        let d = Blocking::Dyadic;
        let pieces: Vec<Piece> = d.pieces().take(4).collect();
        assert_eq!(pieces[0], Piece { index: 1, lo: 1, hi: 1 });
        assert_eq!(pieces[1], Piece { index: 2, lo: 2, hi: 3 });
        assert_eq!(pieces[2], Piece { index: 3, lo: 4, hi: 7 });
        assert_eq!(pieces[3], Piece { index: 4, lo: 8, hi: 15 });
        // Every n lies in exactly one piece.
        for n in 1..=4096u64 {
            let k = d.piece_index_of(n).unwrap();
            let elems = d.piece_elems(k);
            assert!(elems.contains(&n));
        }
    }

    #[test]
    fn dyadic_min_selector_is_powers_of_two() {
        let sel = SetExpr::Selector {
            blocking: Box::new(Blocking::Dyadic),
            choice: Choice::Min,
        };
        for n in 1..=4096u64 {
            assert_eq!(sel.member(n), n.is_power_of_two(), "n={n}");
        }
        // One element per dyadic block meeting [1, 2^20]: 21 of them.
        assert_eq!(sel.counting(1 << 20), 21);
    }

    #[test]
    fn explicit_boundaries_pieces() {
        let b = Blocking::explicit(vec![2, 4, 8]).unwrap();
        assert_eq!(b.piece_elems(1), vec![1, 2]);
        assert_eq!(b.piece_elems(2), vec![3, 4]);
        assert_eq!(b.piece_elems(3), vec![5, 6, 7, 8]);
        // Singletons afterwards.
        assert_eq!(b.piece_elems(4), vec![9]);
        assert_eq!(b.piece_elems(7), vec![12]);
        assert_eq!(b.piece_index_of(12), Some(7));
    }

    #[test]
    fn non_increasing_boundaries_rejected() {
        assert!(matches!(
            Blocking::explicit(vec![3, 3]),
            Err(FilterlabError::InvalidBlocking(_))
        ));
        assert!(Blocking::explicit(vec![0, 2]).is_err());
    }

    #[test]
    fn derived_dyadic_on_evens_skips_empty_first_window() {
        let b = Blocking::derived_dyadic(SetExpr::evens()).unwrap();
        // Window [1,1] holds no even number; first piece is {2,3}∩evens = {2}.
        assert_eq!(b.piece_elems(1), vec![2]);
        assert_eq!(b.piece_elems(2), vec![4, 6]);
        assert_eq!(b.piece_elems(3), vec![8, 10, 12, 14]);
        for n in (2..=2048u64).step_by(2) {
            assert!(b.piece_index_of(n).is_some());
        }
        assert_eq!(b.piece_index_of(5), None);
    }

    #[test]
    fn derived_needs_infinite_ground() {
        assert!(Blocking::derived(SetExpr::finite([1, 2, 3]), vec![2]).is_err());
    }

    #[test]
    fn pieces_partition_ground() {
        use std::collections::BTreeSet;
        for blocking in [
            Blocking::Dyadic,
            Blocking::explicit(vec![5, 6, 20]).unwrap(),
            Blocking::derived(SetExpr::ap(1, 3), vec![10, 11, 40]).unwrap(),
        ] {
            let mut seen: BTreeSet<u64> = BTreeSet::new();
            for piece in blocking.pieces() {
                if piece.lo > 3000 {
                    break;
                }
                for v in (piece.lo..=piece.hi).filter(|&v| blocking.ground_member(v)) {
                    assert!(seen.insert(v), "{v} covered twice");
                    assert_eq!(blocking.piece_index_of(v), Some(piece.index));
                }
            }
            for n in 1..=2048u64 {
                if blocking.ground_member(n) {
                    assert!(seen.contains(&n), "{n} not covered");
                }
            }
        }
    }
}
