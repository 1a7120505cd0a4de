//! Named demos. Each one exercises a characterization end to end,
//! prints one line per sub-check, and succeeds when every verdict
//! matches the expected status.

use num_traits::One;

use filterlab_core::constructions::{
    build_block_counterexample, extract_basic_subsequence, extract_fd_claim,
    oscillation_functional, DeltaSchedule, SignRule,
};
use filterlab_core::convergence::{
    coordinate_stuck_along, f_limit, stat_vs_cesaro, ConvergenceQuery, Mode, QueryLimit, QuerySeq,
};
use filterlab_core::filters::witness::{
    block_respecting_check, diagonal_check, split_stationary, BaseChain,
};
use filterlab_core::filters::{Certificate, FilterHandle, Status, Verdict};
use filterlab_core::l1seq::{perturbed_basis, remark_sequence, L1Vec, ScalarSeq};
use filterlab_core::ratio::rat;
use filterlab_core::setalg::{Blocking, ColumnRule, ColumnSelector, ColumnSet, EpSet, SetExpr};

use crate::report::ReportBuilder;

pub const DEMO_NAMES: &[&str] = &["theorem2", "theorem4", "theorem13", "theorem15", "remark5"];

pub fn run_demo(
    name: &str,
    horizon: u64,
    seed: u64,
    report: &mut ReportBuilder,
) -> Result<bool, String> {
    match name {
        "theorem2" => demo_theorem2(horizon, seed, report),
        "theorem4" => demo_theorem4(horizon, seed, report),
        "theorem13" => demo_theorem13(horizon, report),
        "theorem15" => demo_theorem15(horizon, report),
        "remark5" => demo_remark5(horizon, report),
        other => Err(format!(
            "unknown demo {other:?} (available: {})",
            DEMO_NAMES.join(", ")
        )),
    }
}

fn expect(
    report: &mut ReportBuilder,
    ok: &mut bool,
    id: &str,
    verdict: Verdict,
    expected: Status,
    line: &str,
) {
    let got = verdict.status;
    let matched = got == expected;
    *ok &= matched;
    println!(
        "  [{}] {id}: {line} (expected {:?}, got {:?})",
        if matched { "ok" } else { "MISMATCH" },
        expected,
        got
    );
    report.push(id, verdict);
}

/// Block-respecting characterizes the simplified Schur property: the
/// classical filter admits selectors and gliding-hump extractions; the
/// statistical filter does not, and the Walsh block construction turns
/// that failure into a weakly null sequence of unit-plus norms.
fn demo_theorem2(horizon: u64, seed: u64, report: &mut ReportBuilder) -> Result<bool, String> {
    println!("demo theorem2: simplified Schur property ⟺ block-respecting selectors");
    let mut ok = true;
    let v = block_respecting_check(
        &FilterHandle::Frechet,
        &SetExpr::naturals(),
        &Blocking::Dyadic,
        horizon,
    )
    .map_err(|e| e.to_string())?;
    expect(
        report,
        &mut ok,
        "frechet-block-respecting",
        v,
        Status::Proved,
        "min selectors are stationary for the classical filter",
    );
    let v = block_respecting_check(
        &FilterHandle::Statistical,
        &SetExpr::naturals(),
        &Blocking::Dyadic,
        horizon,
    )
    .map_err(|e| e.to_string())?;
    expect(
        report,
        &mut ok,
        "statistical-block-respecting",
        v,
        Status::Refuted,
        "unit selectors over dyadic pieces have density zero",
    );
    let schedule = DeltaSchedule::geometric(rat(1, 2), rat(1, 32), rat(1, 2)).unwrap();
    let (v, cert) = extract_basic_subsequence(
        &FilterHandle::Frechet,
        &perturbed_basis(),
        &SetExpr::naturals(),
        &schedule,
        horizon,
        200,
        seed,
    )
    .map_err(|e| e.to_string())?;
    if let Some(c) = cert {
        report.push_extra("extraction", serde_json::to_value(&c).unwrap());
    }
    expect(
        report,
        &mut ok,
        "gliding-hump-extraction",
        v,
        Status::Proved,
        "extraction yields a basis-equivalent stationary subsequence",
    );
    let cx = build_block_counterexample(
        &FilterHandle::Statistical,
        &SetExpr::naturals(),
        &Blocking::Dyadic,
        &rat(1, 2),
        1 << 16,
        60,
        horizon,
        seed,
    )
    .map_err(|e| e.to_string())?;
    let cx_ok = cx.certificate.verify();
    println!(
        "  [{}] walsh-counterexample: per-block violations ≤ {} over {} functionals",
        if cx_ok { "ok" } else { "MISMATCH" },
        cx.certificate.d_max,
        cx.certificate.functional_count
    );
    ok &= cx_ok;
    report.push_extra(
        "weak-convergence",
        serde_json::to_value(&cx.certificate).unwrap(),
    );
    Ok(ok)
}

/// The column tail filter: Schur without diagonality. The canonical
/// vanishing chain refutes diagonality; the triangular extraction and
/// the oscillation functional supply the Schur-side machinery.
fn demo_theorem4(horizon: u64, seed: u64, report: &mut ReportBuilder) -> Result<bool, String> {
    println!("demo theorem4: the column tail filter is a non-diagonal Schur filter");
    let mut ok = true;
    let v = diagonal_check(
        &FilterHandle::ColumnFdTail,
        &BaseChain::ColumnTails,
        &SetExpr::naturals(),
        horizon,
    )
    .map_err(|e| e.to_string())?;
    expect(
        report,
        &mut ok,
        "fd-not-diagonal",
        v,
        Status::Refuted,
        "the vanishing-column chain defeats every candidate witness",
    );
    let standard = SetExpr::Columns(ColumnSet::new(
        ColumnSelector::All,
        ColumnRule::Subsample { first: 1, step: 2 },
    ));
    let blocking = Blocking::derived_dyadic(standard.clone()).map_err(|e| e.to_string())?;
    let v = block_respecting_check(&FilterHandle::ColumnFdTail, &standard, &blocking, horizon)
        .map_err(|e| e.to_string())?;
    expect(
        report,
        &mut ok,
        "fd-block-respecting",
        v,
        Status::Proved,
        "greedy routing spreads selector picks over the columns",
    );
    let schedule = DeltaSchedule::geometric(rat(1, 2), rat(1, 32), rat(1, 2)).unwrap();
    let (v, cert) = extract_fd_claim(
        &filterlab_core::l1seq::injective_basis(true),
        &schedule,
        horizon,
        12,
        200,
        seed,
    )
    .map_err(|e| e.to_string())?;
    if let Some(c) = cert {
        report.push_extra("fd-claim", serde_json::to_value(&c).unwrap());
    }
    expect(
        report,
        &mut ok,
        "fd-triangular-extraction",
        v,
        Status::Proved,
        "triangular column selection is basis-equivalent",
    );
    let (_f, osc) = oscillation_functional(
        &filterlab_core::l1seq::injective_basis(false),
        SignRule::AlternatingPerColumn,
        horizon.min(4096),
        5,
    )
    .map_err(|e| e.to_string())?;
    let osc_ok = osc.verify() && osc.min_oscillation == "2";
    println!(
        "  [{}] fd-oscillation: alternating signs oscillate by {} per column",
        if osc_ok { "ok" } else { "MISMATCH" },
        osc.min_oscillation
    );
    ok &= osc_ok;
    report.push_extra("oscillation", serde_json::to_value(&osc).unwrap());
    let (_a, _b, va, vb) = split_stationary(&FilterHandle::ColumnFdTail, &standard, horizon)
        .map_err(|e| e.to_string())?;
    expect(
        report,
        &mut ok,
        "fd-split-first-half",
        va,
        Status::Proved,
        "standard sets split into standard halves",
    );
    expect(
        report,
        &mut ok,
        "fd-split-second-half",
        vb,
        Status::Proved,
        "both halves stay stationary",
    );
    Ok(ok)
}

/// The statistical filter fails the simplified Schur property through
/// the dyadic blocking, while its Cesàro mechanism still identifies
/// statistical limits of bounded scalar sequences.
fn demo_theorem13(horizon: u64, report: &mut ReportBuilder) -> Result<bool, String> {
    println!("demo theorem13: statistical filter: no block-respect, Cesàro mechanism intact");
    let mut ok = true;
    let v = block_respecting_check(
        &FilterHandle::Statistical,
        &SetExpr::naturals(),
        &Blocking::Dyadic,
        horizon.max(1 << 20),
    )
    .map_err(|e| e.to_string())?;
    if let Certificate::SelectorRefutation {
        min_selector_count, ..
    } = &v.certificate
    {
        println!(
            "  min selector holds {} points below 2^20: density at most 21/2^20",
            min_selector_count
        );
    }
    expect(
        report,
        &mut ok,
        "statistical-not-block-respecting",
        v,
        Status::Refuted,
        "any unit selector over dyadic pieces is negligible",
    );
    let q = ConvergenceQuery {
        filter: FilterHandle::Statistical,
        seq: QuerySeq::Scalar(ScalarSeq::square_indicator()),
        limit: QueryLimit::Scalar(rat(0, 1)),
        mode: Mode::Scalar,
        eps: rat(1, 2),
        horizon,
    };
    let v = f_limit(&q).map_err(|e| e.to_string())?;
    expect(
        report,
        &mut ok,
        "square-indicator-null",
        v,
        Status::Proved,
        "the square indicator is statistically null",
    );
    let v = stat_vs_cesaro(
        &ScalarSeq::square_indicator(),
        &rat(0, 1),
        horizon.max(1 << 16),
        &rat(1, 100),
    )
    .map_err(|e| e.to_string())?;
    expect(
        report,
        &mut ok,
        "statistical-cesaro-agreement",
        v,
        Status::Proved,
        "statistical and strong-Cesàro diagnostics agree",
    );
    Ok(ok)
}

/// The sum of a classical filter on the odds with the statistical
/// filter on the evens loses the block-respecting property; its trace
/// on the odds regains it, although the trace dominates the sum.
fn demo_theorem15(horizon: u64, report: &mut ReportBuilder) -> Result<bool, String> {
    println!("demo theorem15: quasi-increasing properties are not downward closed");
    let mut ok = true;
    let odds = SetExpr::odds();
    let evens = SetExpr::evens();
    let sum = FilterHandle::sum(
        FilterHandle::Frechet,
        odds.clone(),
        FilterHandle::Statistical,
        evens.clone(),
    )
    .map_err(|e| e.to_string())?;
    let inner_blocking = Blocking::derived_dyadic(evens.clone()).map_err(|e| e.to_string())?;
    let v = block_respecting_check(&sum, &evens, &inner_blocking, horizon)
        .map_err(|e| e.to_string())?;
    expect(
        report,
        &mut ok,
        "sum-block-respecting",
        v,
        Status::Refuted,
        "the statistical part refutes selectors inside the even summand",
    );
    let trace = FilterHandle::Frechet
        .trace(odds.clone(), horizon)
        .map_err(|e| e.to_string())?;
    let odd_blocking = Blocking::derived_dyadic(odds.clone()).map_err(|e| e.to_string())?;
    let v = block_respecting_check(&trace, &odds, &odd_blocking, horizon)
        .map_err(|e| e.to_string())?;
    expect(
        report,
        &mut ok,
        "trace-block-respecting",
        v,
        Status::Proved,
        "the trace on the odd summand keeps its selectors",
    );
    Ok(ok)
}

/// The doubled-basis sequence over the column pairing: coordinate-wise
/// null along the whole column tail filter, yet stuck at height one on
/// a column inside every standard subset.
fn demo_remark5(horizon: u64, report: &mut ReportBuilder) -> Result<bool, String> {
    println!("demo remark5: coordinate-wise null for the filter, stuck along every standard set");
    let mut ok = true;
    let q = ConvergenceQuery {
        filter: FilterHandle::ColumnFdTail,
        seq: QuerySeq::Vector(remark_sequence()),
        limit: QueryLimit::Vector(L1Vec::zero()),
        mode: Mode::Coordinatewise { coord_cap: 16 },
        eps: rat(1, 2),
        horizon,
    };
    let v = f_limit(&q).map_err(|e| e.to_string())?;
    expect(
        report,
        &mut ok,
        "remark-coordinatewise-null",
        v,
        Status::Proved,
        "every coordinate's escape set misses a base set",
    );
    for (idx, step) in [1u64, 2, 3].into_iter().enumerate() {
        let standard = SetExpr::Columns(ColumnSet::new(
            ColumnSelector::All,
            ColumnRule::Positions(EpSet::from_ap(1, step)),
        ));
        match coordinate_stuck_along(
            &remark_sequence(),
            &standard,
            &num_rational::BigRational::one(),
            horizon.min(100_000),
        ) {
            Some((coord, hits)) => {
                let good = hits.len() >= 20;
                println!(
                    "  [{}] standard set {}: coordinate {} stays at height 1 on {} indices",
                    if good { "ok" } else { "MISMATCH" },
                    idx + 1,
                    coord,
                    hits.len()
                );
                ok &= good;
                report.push(
                    format!("remark-stuck-standard-{}", idx + 1),
                    Verdict::refuted(
                        Certificate::HorizonEvidence {
                            counts: vec![(horizon.min(100_000), hits.len() as u64)],
                        },
                        horizon,
                    ),
                );
            }
            None => {
                println!("  [MISMATCH] standard set {}: no stuck coordinate found", idx + 1);
                ok = false;
            }
        }
    }
    Ok(ok)
}
