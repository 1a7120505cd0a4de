//! Eventually periodic subsets of ℕ = {1, 2, ...}.
//!
//! An [`EpSet`] stores a finite prefix of membership bits followed by a
//! repeating period word. The class is closed under the boolean
//! operations, so it serves both as the normal form for value-space set
//! expressions and as the exact per-column position algebra used by the
//! column filters.

use num_bigint::BigInt;
use num_rational::BigRational;

/// Size cap for aligned prefixes and lcm periods; combinations that
/// would exceed it report `None` instead of blowing up.
const SIZE_CAP: usize = 1 << 16;

/// Membership rule: `n ≤ prefix.len()` looks up `prefix[n-1]`,
/// larger `n` looks up `period[(n - prefix.len() - 1) % period.len()]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpSet {
    prefix: Vec<bool>,
    period: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    Union,
    Inter,
    Diff,
}

impl EpSet {
    pub fn new(prefix: Vec<bool>, period: Vec<bool>) -> Self {
        assert!(!period.is_empty(), "period word must be non-empty");
        EpSet { prefix, period }.canonicalize()
    }

    pub fn empty() -> Self {
        EpSet {
            prefix: Vec::new(),
            period: vec![false],
        }
    }

    pub fn all() -> Self {
        EpSet {
            prefix: Vec::new(),
            period: vec![true],
        }
    }

    /// The arithmetic progression `first, first+step, ...` intersected
    /// with ℕ; `first = 0` therefore starts at `step`.
    pub fn from_ap(first: u64, step: u64) -> Self {
        assert!(step >= 1, "step must be positive");
        let start = if first >= 1 { first } else { step };
        // prefix covers [1, start-1]; the period begins at n = start,
        // so membership beyond the prefix is (n - start) % step == 0.
        let prefix = vec![false; (start - 1) as usize];
        let mut period = vec![false; step as usize];
        period[0] = true;
        EpSet::new(prefix, period)
    }

    pub fn from_elems<I: IntoIterator<Item = u64>>(elems: I) -> Self {
        let mut elems: Vec<u64> = elems.into_iter().filter(|&e| e >= 1).collect();
        elems.sort_unstable();
        elems.dedup();
        let max = elems.last().copied().unwrap_or(0);
        let mut prefix = vec![false; max as usize];
        for e in elems {
            prefix[(e - 1) as usize] = true;
        }
        EpSet::new(prefix, vec![false])
    }

    /// The interval `[lo, hi]` (empty when `hi < lo`).
    pub fn from_interval(lo: u64, hi: u64) -> Self {
        if hi < lo || hi == 0 {
            return EpSet::empty();
        }
        let lo = lo.max(1);
        let mut prefix = vec![false; hi as usize];
        for n in lo..=hi {
            prefix[(n - 1) as usize] = true;
        }
        EpSet::new(prefix, vec![false])
    }

    /// The tail `[lo, ∞)`.
    pub fn from_tail(lo: u64) -> Self {
        let lo = lo.max(1);
        EpSet::new(vec![false; (lo - 1) as usize], vec![true])
    }

    pub fn member(&self, n: u64) -> bool {
        if n == 0 {
            return false;
        }
        let idx = (n - 1) as usize;
        if idx < self.prefix.len() {
            self.prefix[idx]
        } else {
            self.period[(idx - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    pub fn prefix_word(&self) -> &[bool] {
        &self.prefix
    }

    pub fn period_word(&self) -> &[bool] {
        &self.period
    }

    pub fn complement(&self) -> EpSet {
        EpSet::new(
            self.prefix.iter().map(|b| !b).collect(),
            self.period.iter().map(|b| !b).collect(),
        )
    }

    /// Pointwise boolean combination after aligning prefixes and
    /// taking the period lcm; `None` when the alignment would exceed
    /// the size cap.
    pub fn binop(&self, other: &EpSet, op: BoolOp) -> Option<EpSet> {
        let prefix_len = self.prefix.len().max(other.prefix.len());
        let period_len = lcm(self.period.len(), other.period.len());
        if prefix_len > SIZE_CAP || period_len > SIZE_CAP {
            return None;
        }
        let apply = |a: bool, b: bool| match op {
            BoolOp::Union => a || b,
            BoolOp::Inter => a && b,
            BoolOp::Diff => a && !b,
        };
        let mut prefix = Vec::with_capacity(prefix_len);
        for n in 1..=(prefix_len as u64) {
            prefix.push(apply(self.member(n), other.member(n)));
        }
        let base = prefix_len as u64;
        let mut period = Vec::with_capacity(period_len);
        for i in 1..=(period_len as u64) {
            period.push(apply(self.member(base + i), other.member(base + i)));
        }
        Some(EpSet::new(prefix, period))
    }

    /// Exact count of members in `[1, n]`.
    pub fn count(&self, n: u64) -> u64 {
        if n == 0 {
            return 0;
        }
        let plen = self.prefix.len() as u64;
        let in_prefix = self
            .prefix
            .iter()
            .take(n.min(plen) as usize)
            .filter(|&&b| b)
            .count() as u64;
        if n <= plen {
            return in_prefix;
        }
        let beyond = n - plen;
        let p = self.period.len() as u64;
        let per_cycle = self.period.iter().filter(|&&b| b).count() as u64;
        let full = beyond / p;
        let rem = (beyond % p) as usize;
        let partial = self.period[..rem].iter().filter(|&&b| b).count() as u64;
        in_prefix + full * per_cycle + partial
    }

    /// Natural density; always exists for eventually periodic sets.
    pub fn density(&self) -> BigRational {
        let trues = self.period.iter().filter(|&&b| b).count();
        BigRational::new(BigInt::from(trues), BigInt::from(self.period.len()))
    }

    pub fn is_finite(&self) -> bool {
        self.period.iter().all(|&b| !b)
    }

    pub fn is_cofinite(&self) -> bool {
        self.period.iter().all(|&b| b)
    }

    pub fn is_empty_set(&self) -> bool {
        self.is_finite() && self.prefix.iter().all(|&b| !b)
    }

    /// Largest member of a finite set.
    pub fn max_elem(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        self.prefix
            .iter()
            .rposition(|&b| b)
            .map(|idx| idx as u64 + 1)
    }

    /// Members of a finite set, in increasing order.
    pub fn elems(&self) -> Option<Vec<u64>> {
        if !self.is_finite() {
            return None;
        }
        Some(
            self.prefix
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| i as u64 + 1)
                .collect(),
        )
    }

    /// Enumeration of the members of an infinite set.
    pub fn true_enum(&self) -> Option<TrueEnum> {
        if self.is_finite() {
            return None;
        }
        let head: Vec<u64> = self
            .prefix
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u64 + 1)
            .collect();
        let base = self.prefix.len() as u64;
        let cycle_offsets: Vec<u64> = self
            .period
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| base + i as u64 + 1)
            .collect();
        Some(TrueEnum {
            head,
            cycle_offsets,
            cycle_step: self.period.len() as u64,
        })
    }

    /// Splits into (odd-ranked members, even-ranked members).
    pub fn alternate(&self) -> (EpSet, EpSet) {
        if let Some(elems) = self.elems() {
            let odd: Vec<u64> = elems.iter().copied().step_by(2).collect();
            let even: Vec<u64> = elems.iter().copied().skip(1).step_by(2).collect();
            return (EpSet::from_elems(odd), EpSet::from_elems(even));
        }
        let e = self.true_enum().expect("infinite set");
        let odds = TrueEnum {
            head: Vec::new(),
            cycle_offsets: vec![1],
            cycle_step: 2,
        };
        let evens = TrueEnum {
            head: Vec::new(),
            cycle_offsets: vec![2],
            cycle_step: 2,
        };
        (e.compose(&odds).to_epset(), e.compose(&evens).to_epset())
    }

    fn canonicalize(mut self) -> EpSet {
        // Reduce the period word to its primitive root.
        let p = self.period.len();
        for d in 1..=p {
            if p % d != 0 {
                continue;
            }
            if (d..p).all(|i| self.period[i] == self.period[i % d]) {
                self.period.truncate(d);
                break;
            }
        }
        // Absorb prefix bits that already match the rotated period.
        let p = self.period.len();
        while let Some(&last) = self.prefix.last() {
            if last == self.period[p - 1] {
                self.prefix.pop();
                self.period.rotate_right(1);
            } else {
                break;
            }
        }
        self
    }
}

/// Exact enumeration of an infinite eventually periodic set: the `k`-th
/// member (1-based) is `head[k-1]` while `k ≤ head.len()`, after which
/// members repeat `cycle_offsets` shifted by multiples of `cycle_step`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrueEnum {
    pub head: Vec<u64>,
    pub cycle_offsets: Vec<u64>,
    pub cycle_step: u64,
}

impl TrueEnum {
    /// The `k`-th member, `k ≥ 1`.
    pub fn at(&self, k: u64) -> u64 {
        let h = self.head.len() as u64;
        if k <= h {
            return self.head[(k - 1) as usize];
        }
        let j = k - h - 1;
        let l = self.cycle_offsets.len() as u64;
        self.cycle_offsets[(j % l) as usize] + (j / l) * self.cycle_step
    }

    /// `{self.at(k) : k a member of indices}` — composition of
    /// strictly increasing enumerations.
    pub fn compose(&self, indices: &TrueEnum) -> TrueEnum {
        // Past this many outer indices both maps are in cyclic regime.
        let mut k0 = indices.head.len() as u64;
        while indices.at(k0 + 1) <= self.head.len() as u64 {
            k0 += 1;
        }
        // Advancing the index by one combined cycle advances the inner
        // value by a fixed amount, so the composed map is cyclic with
        // this length; the step is read off directly.
        let cycle_len = (indices.cycle_offsets.len() * self.cycle_offsets.len()) as u64;
        let head: Vec<u64> = (1..=k0).map(|k| self.at(indices.at(k))).collect();
        let cycle_offsets: Vec<u64> = (k0 + 1..=k0 + cycle_len)
            .map(|k| self.at(indices.at(k)))
            .collect();
        let probe = k0 + 1;
        let cycle_step = self.at(indices.at(probe + cycle_len)) - self.at(indices.at(probe));
        TrueEnum {
            head,
            cycle_offsets,
            cycle_step,
        }
    }

    /// Back to set form.
    pub fn to_epset(&self) -> EpSet {
        let first_cycle = self.cycle_offsets[0];
        debug_assert!(self
            .cycle_offsets
            .iter()
            .all(|&o| o >= first_cycle && o < first_cycle + self.cycle_step));
        debug_assert!(self.head.iter().all(|&h| h < first_cycle));
        let prefix_len = (first_cycle - 1) as usize;
        let mut prefix = vec![false; prefix_len];
        for &h in &self.head {
            prefix[(h - 1) as usize] = true;
        }
        let mut period = vec![false; self.cycle_step as usize];
        for &o in &self.cycle_offsets {
            period[(o - first_cycle) as usize] = true;
        }
        EpSet::new(prefix, period)
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd_u64(a as u64, b as u64) as usize * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ap_membership() {
        let evens = EpSet::from_ap(0, 2);
        assert!(!evens.member(1));
        assert!(evens.member(2));
        assert!(evens.member(4));
        assert!(!evens.member(7));
        assert_eq!(evens.count(100), 50);

        let odds = EpSet::from_ap(1, 2);
        assert!(odds.member(1));
        assert!(!odds.member(2));

        let all = evens.binop(&odds, BoolOp::Union).unwrap();
        assert_eq!(all, EpSet::all());
    }

    #[test]
    fn multiples_of_six_period_word() {
        let m2 = EpSet::from_ap(0, 2);
        let m3 = EpSet::from_ap(0, 3);
        let m6 = m2.binop(&m3, BoolOp::Inter).unwrap();
        assert_eq!(m6.period_len(), 6);
        for n in 1..200 {
            assert_eq!(m6.member(n), n % 6 == 0);
        }
    }

    #[test]
    fn count_closed_form_matches_enumeration() {
        let s = EpSet::new(
            vec![true, false, false, true, true],
            vec![false, true, true, false, false, false, true],
        );
        let mut running = 0;
        for n in 1..=500 {
            if s.member(n) {
                running += 1;
            }
            assert_eq!(s.count(n), running);
        }
    }

    #[test]
    fn finite_sets() {
        let f = EpSet::from_elems([3, 5, 9]);
        assert!(f.is_finite());
        assert_eq!(f.max_elem(), Some(9));
        assert_eq!(f.elems().unwrap(), vec![3, 5, 9]);
        assert!(f.complement().is_cofinite());
    }

    #[test]
    fn true_enum_round_trip() {
        let s = EpSet::new(vec![false, true, true], vec![false, false, true, false]);
        let e = s.true_enum().unwrap();
        let mut expect = Vec::new();
        for n in 1..=200 {
            if s.member(n) {
                expect.push(n);
            }
        }
        for (i, &v) in expect.iter().enumerate() {
            assert_eq!(e.at(i as u64 + 1), v);
        }
        assert_eq!(e.to_epset(), s);
    }

    #[test]
    fn alternate_splits_evens_into_residues_mod_four() {
        let evens = EpSet::from_ap(0, 2);
        let (a, b) = evens.alternate();
        for n in 1..500 {
            assert_eq!(a.member(n), n % 4 == 2, "n={n}");
            assert_eq!(b.member(n), n % 4 == 0, "n={n}");
        }
        // Halves are disjoint and reassemble the original.
        let back = a.binop(&b, BoolOp::Union).unwrap();
        assert_eq!(back, evens);
        assert!(a.binop(&b, BoolOp::Inter).unwrap().is_empty_set());
    }

    #[test]
    fn compose_selects_subsequence() {
        // Members of "multiples of 3" at square-free index pattern:
        // just check compose against brute force on an irregular pair.
        let outer = EpSet::new(vec![true, false], vec![true, false, false, true, false]);
        let inner = EpSet::new(vec![false, true, true, true], vec![false, true, true]);
        let oe = outer.true_enum().unwrap();
        let ie = inner.true_enum().unwrap();
        let composed = oe.compose(&ie);
        for k in 1..300u64 {
            assert_eq!(composed.at(k), oe.at(ie.at(k)), "k={k}");
        }
        let as_set = composed.to_epset();
        for n in 1..2000u64 {
            let brute = {
                // n is in the image iff n = outer.at(j) for a j in inner.
                let mut found = false;
                let mut j = 1u64;
                loop {
                    let v = oe.at(j);
                    if v > n {
                        break;
                    }
                    if v == n && inner.member(j) {
                        found = true;
                        break;
                    }
                    j += 1;
                }
                found
            };
            assert_eq!(as_set.member(n), brute, "n={n}");
        }
    }
}
