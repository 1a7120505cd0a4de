//! Acceptance suite: one test per criterion, each printing a
//! pass/fail line and enforcing its tolerances and runtime budget.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use filterlab_core::cert;
use filterlab_core::constructions::{
    build_block_counterexample, ceil_two_over_eps_squared, extract_basic_subsequence,
    khintchine_sum, walsh_system, DeltaSchedule,
};
use filterlab_core::convergence::{
    cesaro_average, cluster_refuter, coordinate_stuck_along, f_limit, stat_vs_cesaro,
    ConvergenceQuery, Mode, QueryLimit, QuerySeq,
};
use filterlab_core::filters::witness::{
    block_respecting_check, diagonal_check, strongly_diagonal_witness, BaseChain,
};
use filterlab_core::filters::{Certificate, FilterHandle, Status};
use filterlab_core::l1seq::{
    perturbed_basis, remark_sequence, L1Vec, ScalarSeq, SpikeSet,
};
use filterlab_core::ratio::{parse_rational, rat};
use filterlab_core::setalg::{Blocking, ColumnRule, ColumnSelector, ColumnSet, EpSet, SetExpr};

struct Budget {
    label: &'static str,
    start: Instant,
    limit_s: u64,
}

impl Budget {
    fn new(label: &'static str, limit_s: u64) -> Budget {
        Budget {
            label,
            start: Instant::now(),
            limit_s,
        }
    }

    fn finish(self, detail: &str) {
        let elapsed = self.start.elapsed();
        println!(
            "[PASS] {}: {} ({:.2}s of {}s budget)",
            self.label,
            detail,
            elapsed.as_secs_f64(),
            self.limit_s
        );
        assert!(
            elapsed.as_secs() < self.limit_s,
            "{} exceeded its {}s runtime budget ({:?})",
            self.label,
            self.limit_s,
            elapsed
        );
    }
}

/// Criterion 1 — exact almost-Euclidean bounds for the Walsh systems:
/// tight cases at d = 2, and 1000 seeded rational vectors per
/// dimension up to 16 with zero violations.
#[test]
fn criterion_1_walsh_bounds() {
    let budget = Budget::new("criterion 1 (walsh bounds)", 60);
    // d = 2 tight values, exact: lower attained at (1,1), upper at (1,0).
    let s_all_ones = khintchine_sum(&[1, 1]);
    assert_eq!(s_all_ones * s_all_ones, 16);
    assert_eq!((1i128 << 3) * 2, 16);
    let s_unit = khintchine_sum(&[1, 0]);
    assert_eq!(s_unit * s_unit, 16);
    assert_eq!(1i128 << 4, 16);
    let mut checked = 0u64;
    for dim in 1..=16u32 {
        let (system, report) = walsh_system(dim, 1000, 20_260_810).unwrap();
        assert_eq!(report.violations, 0, "violations at d={dim}");
        assert!(report.verify(), "extremal records failed at d={dim}");
        assert_eq!(system.block_len(), 1u64 << dim);
        checked += report.samples;
    }
    budget.finish(&format!(
        "16 = 16 twice at d=2; {checked} seeded vectors across d ≤ 16, zero violations"
    ));
}

/// Criterion 2 — the dyadic refutation through the CLI: exit code 10,
/// min-selector count 21 at 2^20, density ratio under 2.1·10⁻⁵, and
/// the generic logarithmic bound in the certificate.
#[test]
fn criterion_2_statistical_dyadic_refutation() {
    let budget = Budget::new("criterion 2 (dyadic refutation via CLI)", 10);
    let out = std::env::temp_dir().join("filterlab-acceptance-c2.json");
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_filterlab"))
        .args([
            "check-block-respecting",
            "--filter",
            "statistical",
            "--blocking",
            "dyadic",
            "--horizon",
            "1048576",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .expect("binary runs");
    assert_eq!(status.code(), Some(10), "expected the refuted exit code");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let verdict = &report["verdicts"][0]["verdict"];
    assert_eq!(verdict["status"], "refuted");
    let cert = &verdict["certificate"];
    assert_eq!(cert["type"], "selector-refutation");
    let count = cert["min_selector_count"].as_u64().unwrap();
    assert!(count <= 21, "counting(J, 2^20) = {count} > 21");
    assert_eq!(count, 21);
    let ratio = parse_rational(cert["density_ratio"].as_str().unwrap()).unwrap();
    assert_eq!(ratio, rat(21, 1 << 20));
    assert!(
        ratio < BigRational::new(BigInt::from(21), BigInt::from(1_000_000)),
        "density bound must stay under 2.1e-5"
    );
    let generic = cert["generic_bound"].as_str().unwrap();
    assert!(generic.contains("log2(n)+2"));
    for cp in cert["checkpoints"].as_array().unwrap() {
        let (pieces, bound) = (cp[1].as_u64().unwrap(), cp[2].as_u64().unwrap());
        assert!(pieces <= bound);
    }
    budget.finish("exit 10, counting 21 ≤ 21, ratio 21/2^20 < 2.1e-5, log bound present");
}

/// Criterion 3 — the weak-convergence certificate of the dyadic Walsh
/// counterexample at ε = 1/2: violation bound 8 = ⌈2/ε²⌉, never
/// exceeded over 200 seeded dual-ball functionals reaching 2^16
/// coordinates.
#[test]
fn criterion_3_weak_convergence_certificate() {
    let budget = Budget::new("criterion 3 (weak-convergence bound)", 120);
    let eps = rat(1, 2);
    assert_eq!(ceil_two_over_eps_squared(&eps), 8);
    let cx = build_block_counterexample(
        &FilterHandle::Statistical,
        &SetExpr::naturals(),
        &Blocking::Dyadic,
        &eps,
        1 << 16,
        200,
        1 << 20,
        20_260_810,
    )
    .unwrap();
    assert_eq!(cx.certificate.d_max, 8);
    assert_eq!(cx.certificate.functional_count, 200);
    assert!(
        cx.certificate.max_violations_observed <= 8,
        "observed {} violations in one block",
        cx.certificate.max_violations_observed
    );
    assert!(cx.certificate.verify());
    // Coverage reaches the 2^16 coordinate budget.
    let last = cx.assignments.last().unwrap();
    assert!(last.offset + (1u64 << last.dim) >= 1 << 16);
    budget.finish(&format!(
        "bound 8 = ⌈2/ε²⌉ holds for all 200 functionals (worst observed {})",
        cx.certificate.max_violations_observed
    ));
}

/// Criterion 4 — gliding-hump extraction on the perturbed basis at
/// ε = 1/2 with the geometric schedule of total 1/16: every recorded
/// inequality re-verifies, perturbations stay under twice the schedule,
/// and the equivalence lower bound holds on 1000 seeded coefficient
/// vectors with zero violations.
#[test]
fn criterion_4_gliding_hump() {
    let budget = Budget::new("criterion 4 (gliding hump)", 30);
    let eps = rat(1, 2);
    let schedule = DeltaSchedule::geometric(eps.clone(), rat(1, 32), rat(1, 2)).unwrap();
    // Schedule total is exactly ε/8 = 1/16.
    assert_eq!(schedule.delta(1), rat(1, 32));
    let (verdict, cert) = extract_basic_subsequence(
        &FilterHandle::Frechet,
        &perturbed_basis(),
        &SetExpr::naturals(),
        &schedule,
        1 << 16,
        1000,
        20_260_810,
    )
    .unwrap();
    assert!(verdict.is_proved());
    let cert = cert.unwrap();
    assert!(cert.verify(), "a recorded inequality failed to replay");
    assert!(cert.kept.len() >= 3);
    // Perturbations under twice the schedule: recompute each defect.
    for (i, (&j, &(lo, hi))) in cert.kept.iter().zip(&cert.windows).enumerate() {
        let y = perturbed_basis().eval(j);
        let defect = y.sub(&y.restrict_window(lo, hi)).unwrap().norm1().value;
        let stage = 2 * (i as u64 + 1) - 2;
        let bound = BigRational::from_integer(2.into())
            * schedule.delta(if stage == 0 { j } else { stage });
        assert!(defect <= bound, "perturbation {i} exceeds 2δ");
    }
    // Equivalence constants: c₁ = 1 − ε/ε₀ with zero violations on 1000
    // samples, independently replayed.
    assert_eq!(cert.perturbation.samples, 1000);
    assert_eq!(cert.perturbation.violations, 0);
    let eps0 = parse_rational(&cert.perturbation.eps0).unwrap();
    assert!(eps0 >= BigRational::one());
    assert_eq!(
        parse_rational(&cert.perturbation.c1).unwrap(),
        BigRational::one() - &eps / &eps0
    );
    cert::reverify_perturbation(&cert.perturbation).unwrap();
    budget.finish(&format!(
        "{} kept vectors, 1000 samples, zero violations, c1 = {}",
        cert.kept.len(),
        cert.perturbation.c1
    ));
}

/// Criterion 5 — strongly diagonal witnesses: the tails-base filter
/// with the chain dropping two points per step, layer bound re-checked
/// for every n ≤ 10⁴ and the first 100 base sets met; then the same
/// for the everywhere-column filter.
#[test]
fn criterion_5_strongly_diagonal() {
    let budget = Budget::new("criterion 5 (strongly diagonal witnesses)", 10);
    let chain = BaseChain::Tails { step: 2 };
    let v = strongly_diagonal_witness(
        &FilterHandle::countable_tails(),
        &chain,
        &SetExpr::naturals(),
        50_000,
    )
    .unwrap();
    assert!(v.is_proved());
    let (picks, base_sets_met) = match &v.certificate {
        Certificate::StrongDiagonal {
            picks,
            layers,
            base_sets_met,
            ..
        } => {
            cert::reverify_layer_table(picks, layers, &chain).unwrap();
            (picks.clone(), *base_sets_met)
        }
        other => panic!("unexpected certificate {other:?}"),
    };
    assert!(base_sets_met >= 100, "only {base_sets_met} base sets met");
    // Independent recount of |(J ∩ A_n) \ A_{n+1}| for every n ≤ 10^4.
    for n in 1..=10_000u64 {
        let count = picks
            .iter()
            .filter(|&&j| chain.member(n, j) && !chain.member(n + 1, j))
            .count();
        assert!(count <= 1, "layer bound broken at n = {n}");
    }
    // The everywhere-column filter passes the same check on its
    // canonical shrinking chain.
    let col_chain = BaseChain::ColumnShrink { step: 1 };
    let v = strongly_diagonal_witness(
        &FilterHandle::ColumnFdEvery,
        &col_chain,
        &SetExpr::naturals(),
        200_000,
    )
    .unwrap();
    assert!(v.is_proved());
    match &v.certificate {
        Certificate::StrongDiagonal {
            picks,
            layers,
            base_sets_met,
            ..
        } => {
            cert::reverify_layer_table(picks, layers, &col_chain).unwrap();
            assert!(*base_sets_met >= 100);
            for n in 1..=10_000u64 {
                let count = picks
                    .iter()
                    .filter(|&&j| col_chain.member(n, j) && !col_chain.member(n + 1, j))
                    .count();
                assert!(count <= 1, "column layer bound broken at n = {n}");
            }
        }
        other => panic!("unexpected certificate {other:?}"),
    }
    budget.finish(&format!(
        "layer bound ≤ 1 for all n ≤ 10^4, {base_sets_met} base sets met, column variant included"
    ));
}

/// Criterion 6 — non-diagonality of the column tail filter and the
/// doubled-basis sequence: the canonical chain refutes diagonality;
/// along ten sampled standard sets a coordinate sticks at height one on
/// at least 100 indices below 10⁵; the whole-filter coordinate-wise
/// convergence is proved.
#[test]
fn criterion_6_column_filter_non_diagonality() {
    let budget = Budget::new("criterion 6 (column filter non-diagonality)", 30);
    let v = diagonal_check(
        &FilterHandle::ColumnFdTail,
        &BaseChain::ColumnTails,
        &SetExpr::naturals(),
        1 << 14,
    )
    .unwrap();
    assert!(v.is_refuted(), "diagonality must be refuted");
    // Ten seeded standard sets: dense sub-columns of every column.
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_810);
    let seq = remark_sequence();
    for sample in 0..10 {
        let first = rng.gen_range(1..=2u64);
        let step = rng.gen_range(1..=2u64);
        let standard = SetExpr::Columns(ColumnSet::new(
            ColumnSelector::All,
            ColumnRule::Positions(EpSet::from_ap(first, step)),
        ));
        let (coord, hits) =
            coordinate_stuck_along(&seq, &standard, &BigRational::one(), 100_000)
                .expect("a stuck coordinate exists");
        assert!(
            hits.len() >= 100,
            "sample {sample}: only {} stuck indices",
            hits.len()
        );
        // The stuck coordinate is the column coordinate, at height
        // exactly one on the witnesses (except the single collision).
        for &n in hits.iter().take(100) {
            let value = seq.eval(n).coord_raw(coord);
            assert!(
                value == BigRational::one() || n == coord,
                "sample {sample}: coordinate {coord} has height {value} at {n}"
            );
        }
    }
    // Whole-filter coordinate-wise convergence to zero.
    let q = ConvergenceQuery {
        filter: FilterHandle::ColumnFdTail,
        seq: QuerySeq::Vector(seq),
        limit: QueryLimit::Vector(L1Vec::zero()),
        mode: Mode::Coordinatewise { coord_cap: 16 },
        eps: rat(1, 2),
        horizon: 1 << 14,
    };
    let v = f_limit(&q).unwrap();
    assert!(v.is_proved(), "whole-filter coordinatewise must be proved");
    budget.finish("refuted chain, 10 standard sets with ≥ 100 stuck indices, whole-filter proved");
}

/// Criterion 7 — statistical vs strong-Cesàro diagnostics agree on 20
/// seeded bounded sequences at horizon 10⁶, tolerance 10⁻²; the square
/// indicator averages to exactly 10⁻³.
#[test]
fn criterion_7_statistical_cesaro_agreement() {
    let budget = Budget::new("criterion 7 (statistical/Cesàro agreement)", 60);
    let tol = rat(1, 100);
    let horizon = 1_000_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_810);
    let mut cases: Vec<(ScalarSeq, BigRational)> = Vec::new();
    // Ten density-zero perturbations of constants.
    for _ in 0..10 {
        let value = rat(rng.gen_range(-4..=4), rng.gen_range(1..=4));
        let spike = &value + rat(rng.gen_range(1..=3), 1);
        let spikes = if rng.gen_bool(0.5) {
            SpikeSet::Squares
        } else {
            SpikeSet::PowersOfTwo
        };
        cases.push((ScalarSeq::spiked(value.clone(), spike, spikes), value));
    }
    // Nine oscillators with separated values.
    for _ in 0..9 {
        let a = rat(rng.gen_range(-2..=2), 1);
        let b = &a + rat(rng.gen_range(1..=2), 1);
        let candidate = if rng.gen_bool(0.5) { a.clone() } else { b.clone() };
        let values = vec![a, b];
        cases.push((ScalarSeq::periodic(values).unwrap(), candidate));
    }
    // The square indicator, exactly.
    cases.push((ScalarSeq::square_indicator(), BigRational::zero()));
    assert_eq!(cases.len(), 20);
    for (i, (seq, candidate)) in cases.iter().enumerate() {
        let v = stat_vs_cesaro(seq, candidate, horizon, &tol).unwrap();
        assert!(v.is_proved(), "case {i} ({seq:?}): diagnostics disagree");
    }
    let exact = cesaro_average(&ScalarSeq::square_indicator(), &BigRational::zero(), horizon);
    assert_eq!(exact, rat(1, 1000), "square-indicator average must be exactly 1/1000");
    budget.finish("20 seeded cases agree; square-indicator average exactly 1/1000");
}

/// Criterion 8 — the stationary-escape-set guarantee: over 50 seeded
/// refuted convergence queries, the refuter's set is never certified
/// non-stationary.
#[test]
fn criterion_8_cluster_refuter_contrapositive() {
    let budget = Budget::new("criterion 8 (cluster refuter)", 30);
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_810);
    let filters = [
        FilterHandle::Frechet,
        FilterHandle::Statistical,
        FilterHandle::countable_tails(),
    ];
    let mut refuted = 0u32;
    let mut attempts = 0u32;
    while refuted < 50 && attempts < 400 {
        attempts += 1;
        let filter = filters[rng.gen_range(0..filters.len())].clone();
        let seq = match rng.gen_range(0..5) {
            0 => ScalarSeq::reciprocal(),
            1 => ScalarSeq::alternating_sign(),
            2 => ScalarSeq::square_indicator(),
            3 => ScalarSeq::spiked(
                rat(rng.gen_range(-3..=3), 2),
                rat(rng.gen_range(-3..=3), 1),
                SpikeSet::PowersOfTwo,
            ),
            _ => ScalarSeq::periodic(vec![
                rat(rng.gen_range(-2..=2), 1),
                rat(rng.gen_range(-2..=2), 1),
            ])
            .unwrap(),
        };
        let candidate = rat(rng.gen_range(-2..=2), rng.gen_range(1..=2));
        let eps = rat(1, rng.gen_range(2..=6));
        let q = ConvergenceQuery {
            filter,
            seq: QuerySeq::Scalar(seq),
            limit: QueryLimit::Scalar(candidate),
            mode: Mode::Scalar,
            eps,
            horizon: 1 << 13,
        };
        let verdict = match f_limit(&q) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if !verdict.is_refuted() {
            continue;
        }
        refuted += 1;
        let refutation = cluster_refuter(&q).unwrap().expect("refuted yields a set");
        assert_ne!(
            refutation.stationarity.status,
            Status::Refuted,
            "escape set certified non-stationary for query {attempts}"
        );
    }
    assert!(refuted >= 50, "only {refuted} refuted triples found");
    budget.finish(&format!(
        "{refuted} refuted triples, no escape set certified non-stationary"
    ));
}

/// Criterion 9 — filter axioms and the algebra laws at horizon 10⁴
/// with zero violations: closure under intersections and supersets,
/// no empty member, freeness, and the sum/trace/product cross-checks.
#[test]
fn criterion_9_axioms_and_algebra() {
    let budget = Budget::new("criterion 9 (axioms and algebra)", 30);
    let horizon = 10_000u64;
    let mut violations = 0u32;
    let mut checks = 0u32;
    let filters: Vec<(&str, FilterHandle)> = vec![
        ("frechet", FilterHandle::Frechet),
        ("statistical", FilterHandle::Statistical),
        ("columnFD", FilterHandle::ColumnFdTail),
        ("columnFd", FilterHandle::ColumnFdEvery),
    ];
    for (name, filter) in &filters {
        // Sampled members per kind.
        let mut members: Vec<SetExpr> = vec![
            SetExpr::finite(1..=3).compl(),
            SetExpr::finite([5, 10, 400]).compl(),
            SetExpr::tail(97),
        ];
        match *name {
            "statistical" => {
                members.push(
                    SetExpr::Selector {
                        blocking: Box::new(Blocking::Dyadic),
                        choice: filterlab_core::setalg::Choice::Min,
                    }
                    .compl(),
                );
                members.push(SetExpr::column(1).compl());
            }
            "columnFD" => {
                members.push(SetExpr::Columns(ColumnSet::new(
                    ColumnSelector::From(2),
                    ColumnRule::Full,
                )));
                members.push(SetExpr::Columns(ColumnSet::new(
                    ColumnSelector::From(1),
                    ColumnRule::Positions(EpSet::from_tail(4)),
                )));
            }
            "columnFd" => {
                members.push(SetExpr::Columns(ColumnSet::new(
                    ColumnSelector::All,
                    ColumnRule::Positions(EpSet::from_tail(3)),
                )));
            }
            _ => {}
        }
        for m in &members {
            checks += 1;
            if !filter.contains(m, horizon).is_proved() {
                violations += 1;
            }
            checks += 1;
            if !filter.is_stationary(m, horizon).is_proved() {
                violations += 1;
            }
            checks += 1;
            if !filter
                .contains(&m.clone().union(SetExpr::finite([1, 7])), horizon)
                .is_proved()
            {
                violations += 1;
            }
        }
        for pair in members.chunks(2) {
            if let [a, b] = pair {
                checks += 1;
                if !filter
                    .contains(&a.clone().inter(b.clone()), horizon)
                    .is_proved()
                {
                    violations += 1;
                }
            }
        }
        checks += 1;
        if !filter.contains(&SetExpr::empty(), horizon).is_refuted() {
            violations += 1;
        }
    }
    // Sum cross-check against the direct two-part evaluator.
    let odds = SetExpr::odds();
    let evens = SetExpr::evens();
    let sum = FilterHandle::sum(
        FilterHandle::Frechet,
        odds.clone(),
        FilterHandle::Statistical,
        evens.clone(),
    )
    .unwrap();
    let sampled: Vec<SetExpr> = vec![
        SetExpr::naturals(),
        SetExpr::naturals().diff(SetExpr::finite([2, 4])),
        SetExpr::naturals().diff(SetExpr::ap(0, 4)),
        odds.clone(),
        evens.clone(),
        SetExpr::tail(31),
        odds.clone().union(evens.clone().diff(SetExpr::ap(0, 8))),
        SetExpr::ap(1, 2).union(SetExpr::ap(2, 4)),
        SetExpr::finite(1..=200),
        SetExpr::ap(0, 2).compl(),
        SetExpr::ap(1, 3),
        SetExpr::tail(2).diff(SetExpr::ap(0, 6)),
        odds.clone().diff(SetExpr::finite([9])),
        evens.clone().union(SetExpr::finite([1])),
        SetExpr::ap(3, 4),
        SetExpr::naturals().diff(SetExpr::ap(2, 50)),
        SetExpr::ap(0, 2).union(SetExpr::ap(1, 6)),
        SetExpr::tail(999),
        odds.clone().inter(SetExpr::tail(11)),
        SetExpr::empty().compl(),
    ];
    assert_eq!(sampled.len(), 20);
    for a in &sampled {
        checks += 1;
        let composite = sum.contains(a, horizon).status;
        let left = FilterHandle::Frechet
            .contains(&a.clone().union(odds.clone().compl()), horizon)
            .status;
        let right = FilterHandle::Statistical
            .contains(&a.clone().union(evens.clone().compl()), horizon)
            .status;
        if composite != left.and(right) {
            violations += 1;
        }
    }
    // Trace law on sampled parent members.
    let trace = FilterHandle::Frechet
        .trace(SetExpr::evens(), horizon)
        .unwrap();
    for b in [
        SetExpr::tail(9),
        SetExpr::finite([2, 6]).compl(),
        SetExpr::naturals(),
    ] {
        checks += 1;
        let direct = b.clone().inter(SetExpr::evens());
        if !trace.contains(&direct, horizon).is_proved() {
            violations += 1;
        }
    }
    // Product base containment.
    let product = FilterHandle::product(FilterHandle::Frechet, FilterHandle::Frechet);
    let rect = SetExpr::Columns(ColumnSet::new(
        ColumnSelector::From(3),
        ColumnRule::Positions(EpSet::from_tail(2)),
    ));
    checks += 1;
    if !product.contains(&rect, horizon).is_proved() {
        violations += 1;
    }
    checks += 1;
    if !product.contains(&SetExpr::column(1), horizon).is_refuted() {
        violations += 1;
    }
    assert_eq!(violations, 0, "{violations} of {checks} checks failed");
    budget.finish(&format!("{checks} axiom/algebra checks, zero violations"));
}
