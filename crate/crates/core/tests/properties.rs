//! Property-based invariants for the set algebra and the ℓ₁ engine.

use filterlab_core::l1seq::{cesaro_means, user_defined, L1Vec, TestFunctional};
use filterlab_core::ratio::rat;
use filterlab_core::setalg::{ColumnPartition, EpSet, SetExpr};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use std::sync::Arc;

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

fn arb_epset() -> impl Strategy<Value = EpSet> {
    (
        proptest::collection::vec(any::<bool>(), 0..12),
        proptest::collection::vec(any::<bool>(), 1..8),
    )
        .prop_map(|(prefix, period)| EpSet::new(prefix, period))
}

/// Expression over the eventually periodic fragment.
fn arb_periodic_expr() -> impl Strategy<Value = SetExpr> {
    let leaf = prop_oneof![
        (0u64..20, 1u64..9).prop_map(|(first, step)| SetExpr::ap(first, step)),
        proptest::collection::btree_set(1u64..60, 0..6).prop_map(SetExpr::Finite),
        arb_epset().prop_map(SetExpr::Ep),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| e.compl()),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.union(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.inter(b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.diff(b)),
        ]
    })
}

fn arb_sparse_vec() -> impl Strategy<Value = L1Vec> {
    proptest::collection::vec((1u64..80, -30i64..30, 1i64..8), 0..8).prop_map(|entries| {
        L1Vec::from_coords(
            entries
                .into_iter()
                .map(|(k, num, den)| (k, rat(num, den))),
        )
    })
}

// ---------------------------------------------------------------------------
// Set algebra
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_preserves_membership(expr in arb_periodic_expr()) {
        let ep = expr.normalize().expect("periodic fragment normalizes");
        for n in (1..=10_000u64).step_by(37) {
            prop_assert_eq!(expr.member(n), ep.member(n), "n = {}", n);
        }
    }

    #[test]
    fn counting_is_monotone_and_complementary(expr in arb_periodic_expr()) {
        let mut last = 0;
        for n in 1..=512u64 {
            let c = expr.counting(n);
            prop_assert!(c >= last);
            prop_assert!(c - last <= 1);
            last = c;
        }
        for n in (1..=10_000u64).step_by(97) {
            prop_assert_eq!(expr.counting(n) + expr.clone().compl().counting(n), n);
        }
    }

    #[test]
    fn exact_density_of_complement_sums_to_one(expr in arb_periodic_expr()) {
        let d = filterlab_core::setalg::density(&expr, 1000);
        let dc = filterlab_core::setalg::density(&expr.compl(), 1000);
        prop_assert!(d.exact && dc.exact);
        prop_assert_eq!(d.value.unwrap() + dc.value.unwrap(), rat(1, 1));
    }

    #[test]
    fn pairing_is_bijective(n in 1u64..2_000_000) {
        let p = ColumnPartition;
        let (row, col) = p.pair_of(n);
        prop_assert_eq!(p.index_of(row, col), n);
    }

    #[test]
    fn ep_alternate_partitions(ep in arb_epset()) {
        let (a, b) = ep.alternate();
        for n in 1..=600u64 {
            prop_assert!(!(a.member(n) && b.member(n)));
            prop_assert_eq!(a.member(n) || b.member(n), ep.member(n));
        }
    }
}

// ---------------------------------------------------------------------------
// ℓ₁ engine
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triangle_inequality(u in arb_sparse_vec(), v in arb_sparse_vec()) {
        let sum = u.add(&v).unwrap();
        prop_assert!(sum.norm1().value <= u.norm1().value + v.norm1().value);
    }

    #[test]
    fn dual_ball_contract(v in arb_sparse_vec(), bits in proptest::collection::vec(-4i64..=4, 1..6)) {
        let period: Vec<BigRational> = bits.iter().map(|&b| rat(b, 4)).collect();
        let f = TestFunctional::ep_signs(Vec::new(), period).unwrap();
        let val = f.apply(&v).value;
        let abs = if val < BigRational::zero() { -val } else { val };
        prop_assert!(abs <= v.norm1().value);
    }

    #[test]
    fn head_tail_partition(v in arb_sparse_vec(), m in 0u64..100) {
        prop_assert_eq!(
            v.head_mass(m).value + v.tail_mass(m + 1).value,
            v.norm1().value
        );
    }

    #[test]
    fn cesaro_commutes_with_functionals(
        entries in proptest::collection::vec((1u64..40, -9i64..9, 1i64..5), 1..5),
        n in 1u64..24,
    ) {
        let base: Vec<L1Vec> = entries
            .iter()
            .map(|&(k, num, den)| L1Vec::from_coords([(k, rat(num, den))]))
            .collect();
        let pool = base.clone();
        let g = user_defined(
            "sampled",
            Arc::new(move |j| pool[(j as usize - 1) % pool.len()].clone()),
        );
        let mean = cesaro_means(&g, n).unwrap();
        let f = TestFunctional::Summing;
        let lhs = f.apply(&mean).value;
        let mut rhs = BigRational::zero();
        for j in 1..=n {
            rhs += f.apply(&g.eval(j)).value;
        }
        rhs /= BigRational::from_integer(n.into());
        prop_assert_eq!(lhs, rhs);
    }
}
