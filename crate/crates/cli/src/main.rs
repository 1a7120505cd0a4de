//! filterlab: certificate-producing checks for filter convergence on
//! the naturals.

mod args;
mod demos;
mod report;
mod verify;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use filterlab_core::constructions::{
    build_block_counterexample, extract_basic_subsequence, walsh_system, DeltaSchedule,
};
use filterlab_core::convergence::{
    cluster_refuter, f_limit, stat_vs_cesaro, strong_cesaro, ConvergenceQuery, Mode, QueryLimit,
    QuerySeq,
};
use filterlab_core::filters::json::filter_to_json;
use filterlab_core::filters::witness::{
    block_respecting_check, diagonal_check, split_stationary, strongly_diagonal_witness,
};
use filterlab_core::l1seq::L1Vec;
use filterlab_core::ratio::rat;
use filterlab_core::setalg::json::{blocking_to_json, setexpr_to_json};

use args::*;
use report::{exit_code_for, ReportBuilder};

#[derive(Parser)]
#[command(
    name = "filterlab",
    version,
    about = "Finitely-describable filters on the naturals: membership, stationarity, \
             combinatorial witnesses, and exact-rational convergence certificates"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide filter convergence of a named sequence toward a limit.
    CheckConvergence {
        #[arg(long, default_value = "frechet")]
        filter: String,
        /// Scalar sequences: reciprocal, alternating, squares, linear, const:p/q.
        /// Vector sequences: canonical, remark, perturbed, injective[-plus].
        #[arg(long, default_value = "reciprocal")]
        seq: String,
        /// scalar | norm | coordinatewise | weak
        #[arg(long, default_value = "scalar")]
        mode: String,
        /// Candidate limit (rational for scalar mode, ignored for the
        /// vector modes, which test the zero vector).
        #[arg(long, default_value = "0")]
        limit: String,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        #[arg(long, default_value_t = 1 << 14)]
        horizon: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Witness or refute the block-respecting property.
    CheckBlockRespecting {
        #[arg(long, default_value = "statistical")]
        filter: String,
        #[arg(long, default_value = "naturals")]
        set: String,
        #[arg(long, default_value = "dyadic")]
        blocking: String,
        #[arg(long, default_value_t = 1 << 20)]
        horizon: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Witness or refute diagonality against a base chain.
    CheckDiagonal {
        #[arg(long, default_value = "frechet")]
        filter: String,
        /// tails[:step] | column-tails | column-shrink[:step]
        #[arg(long, default_value = "tails")]
        chain: String,
        #[arg(long, default_value = "naturals")]
        set: String,
        #[arg(long, default_value_t = 1 << 14)]
        horizon: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Produce a strongly diagonal witness with layer certificates.
    CheckStronglyDiagonal {
        #[arg(long, default_value = "tails")]
        filter: String,
        #[arg(long, default_value = "tails:2")]
        chain: String,
        #[arg(long, default_value = "naturals")]
        set: String,
        #[arg(long, default_value_t = 40_000)]
        horizon: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Split a stationary set into two stationary halves.
    SplitStationary {
        #[arg(long, default_value = "frechet")]
        filter: String,
        #[arg(long, default_value = "evens")]
        set: String,
        #[arg(long, default_value_t = 1 << 14)]
        horizon: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run the gliding-hump extraction and certify basis equivalence.
    ExtractGlidingHump {
        #[arg(long, default_value = "frechet")]
        filter: String,
        #[arg(long, default_value = "perturbed")]
        seq: String,
        #[arg(long, default_value = "naturals")]
        set: String,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        #[arg(long, default_value_t = 1 << 16)]
        horizon: u64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Build the Walsh block counterexample over a refuted blocking.
    BuildCounterexample {
        #[arg(long, default_value = "statistical")]
        filter: String,
        #[arg(long, default_value = "naturals")]
        set: String,
        #[arg(long, default_value = "dyadic")]
        blocking: String,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        #[arg(long, default_value_t = 1 << 16)]
        horizon: u64,
        #[arg(long, default_value_t = 200)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Exact strong-Cesàro averages and the statistical comparison.
    Cesaro {
        #[arg(long, default_value = "squares")]
        seq: String,
        #[arg(long, default_value = "0")]
        candidate: String,
        #[arg(long, default_value_t = 1_000_000)]
        horizon: u64,
        #[arg(long, default_value = "1/100")]
        tolerance: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Exact Walsh system bounds for a block dimension.
    WalshBounds {
        #[arg(long, default_value_t = 2)]
        dim: u32,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Re-check a run report's certificates independently.
    VerifyCertificate {
        #[arg(long = "in")]
        input: String,
    },
    /// Run a named end-to-end demonstration.
    Demo {
        name: String,
        #[arg(long, default_value_t = 1 << 16)]
        horizon: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
}

fn emit(report: Value, out: Option<&str>) {
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                usage_error(format!("cannot write {path}: {e}"));
            }
        }
        None => println!("{text}"),
    }
}

fn fail(e: impl std::fmt::Display) -> ! {
    eprintln!("error: {e}");
    std::process::exit(2);
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::CheckConvergence {
            filter,
            seq,
            mode,
            limit,
            epsilon,
            horizon,
            seed,
            out,
        } => {
            let f = parse_filter(&filter);
            let eps = parse_epsilon(&epsilon);
            let horizon = capped_horizon(horizon);
            let (query_seq, query_limit, query_mode) = match mode.as_str() {
                "scalar" => {
                    let c = filterlab_core::ratio::parse_rational(&limit)
                        .unwrap_or_else(|| usage_error("bad --limit rational"));
                    (
                        QuerySeq::Scalar(parse_scalar_seq(&seq)),
                        QueryLimit::Scalar(c),
                        Mode::Scalar,
                    )
                }
                "norm" => (
                    QuerySeq::Vector(parse_vector_seq(&seq)),
                    QueryLimit::Vector(L1Vec::zero()),
                    Mode::Norm,
                ),
                "coordinatewise" => (
                    QuerySeq::Vector(parse_vector_seq(&seq)),
                    QueryLimit::Vector(L1Vec::zero()),
                    Mode::Coordinatewise { coord_cap: 16 },
                ),
                "weak" => (
                    QuerySeq::Vector(parse_vector_seq(&seq)),
                    QueryLimit::Vector(L1Vec::zero()),
                    Mode::Weak {
                        family: vec![filterlab_core::l1seq::TestFunctional::Summing],
                    },
                ),
                other => usage_error(format!("unknown mode {other:?}")),
            };
            let q = ConvergenceQuery {
                filter: f.clone(),
                seq: query_seq,
                limit: query_limit,
                mode: query_mode,
                eps: eps.clone(),
                horizon,
            };
            let inputs = json!({
                "filter": filter_to_json(&f),
                "seq": seq,
                "mode": mode,
                "limit": limit,
                "epsilon": epsilon,
            });
            let mut rb = ReportBuilder::new("check-convergence", inputs, horizon, seed);
            let verdict = f_limit(&q).unwrap_or_else(|e| fail(e));
            if verdict.is_refuted() {
                if let Ok(Some(refutation)) = cluster_refuter(&q) {
                    rb.push(
                        "cluster-refuter-stationarity",
                        refutation.stationarity.clone(),
                    );
                    rb.push_extra(
                        "cluster-refutation-set",
                        setexpr_to_json(&refutation.set),
                    );
                }
            }
            let code = exit_code_for(&[&verdict]);
            rb.push("f-limit", verdict);
            emit(rb.finish(), out.as_deref());
            code
        }
        Cmd::CheckBlockRespecting {
            filter,
            set,
            blocking,
            horizon,
            seed,
            out,
        } => {
            let f = parse_filter(&filter);
            let i = parse_set(&set);
            let d = parse_blocking(&blocking);
            let horizon = capped_horizon(horizon);
            let inputs = json!({
                "filter": filter_to_json(&f),
                "set": setexpr_to_json(&i),
                "blocking": blocking_to_json(&d),
            });
            let mut rb = ReportBuilder::new("check-block-respecting", inputs, horizon, seed);
            let verdict = block_respecting_check(&f, &i, &d, horizon).unwrap_or_else(|e| fail(e));
            let code = exit_code_for(&[&verdict]);
            rb.push("block-respecting", verdict);
            emit(rb.finish(), out.as_deref());
            code
        }
        Cmd::CheckDiagonal {
            filter,
            chain,
            set,
            horizon,
            out,
        } => {
            let f = parse_filter(&filter);
            let c = parse_chain(&chain);
            let i = parse_set(&set);
            let horizon = capped_horizon(horizon);
            let inputs = json!({
                "filter": filter_to_json(&f),
                "chain": serde_json::to_value(&c).unwrap(),
                "set": setexpr_to_json(&i),
            });
            let mut rb = ReportBuilder::new("check-diagonal", inputs, horizon, 0);
            let verdict = diagonal_check(&f, &c, &i, horizon).unwrap_or_else(|e| fail(e));
            let code = exit_code_for(&[&verdict]);
            rb.push("diagonal", verdict);
            emit(rb.finish(), out.as_deref());
            code
        }
        Cmd::CheckStronglyDiagonal {
            filter,
            chain,
            set,
            horizon,
            out,
        } => {
            let f = parse_filter(&filter);
            let c = parse_chain(&chain);
            let i = parse_set(&set);
            let horizon = capped_horizon(horizon);
            let inputs = json!({
                "filter": filter_to_json(&f),
                "chain": serde_json::to_value(&c).unwrap(),
                "set": setexpr_to_json(&i),
            });
            let mut rb = ReportBuilder::new("check-strongly-diagonal", inputs, horizon, 0);
            let verdict =
                strongly_diagonal_witness(&f, &c, &i, horizon).unwrap_or_else(|e| fail(e));
            let code = exit_code_for(&[&verdict]);
            rb.push("strongly-diagonal", verdict);
            emit(rb.finish(), out.as_deref());
            code
        }
        Cmd::SplitStationary {
            filter,
            set,
            horizon,
            out,
        } => {
            let f = parse_filter(&filter);
            let i = parse_set(&set);
            let horizon = capped_horizon(horizon);
            let inputs = json!({
                "filter": filter_to_json(&f),
                "set": setexpr_to_json(&i),
            });
            let mut rb = ReportBuilder::new("split-stationary", inputs, horizon, 0);
            let (a, b, va, vb) = split_stationary(&f, &i, horizon).unwrap_or_else(|e| fail(e));
            let code = exit_code_for(&[&va, &vb]);
            rb.push_extra("first-half", setexpr_to_json(&a));
            rb.push_extra("second-half", setexpr_to_json(&b));
            rb.push("first-half-stationary", va);
            rb.push("second-half-stationary", vb);
            emit(rb.finish(), out.as_deref());
            code
        }
        Cmd::ExtractGlidingHump {
            filter,
            seq,
            set,
            epsilon,
            horizon,
            samples,
            seed,
            out,
        } => {
            let f = parse_filter(&filter);
            let g = parse_vector_seq(&seq);
            let i = parse_set(&set);
            let eps = parse_epsilon(&epsilon);
            let horizon = capped_horizon(horizon);
            let schedule = DeltaSchedule::geometric(
                eps.clone(),
                &eps / rat(16, 1),
                rat(1, 2),
            )
            .unwrap_or_else(|e| fail(e));
            let inputs = json!({
                "filter": filter_to_json(&f),
                "seq": seq,
                "set": setexpr_to_json(&i),
                "epsilon": epsilon,
                "samples": samples,
            });
            let mut rb = ReportBuilder::new("extract-gliding-hump", inputs, horizon, seed);
            let (verdict, cert) =
                extract_basic_subsequence(&f, &g, &i, &schedule, horizon, samples, seed)
                    .unwrap_or_else(|e| fail(e));
            if let Some(c) = cert {
                rb.push_extra("extraction", serde_json::to_value(&c).unwrap());
            }
            let code = exit_code_for(&[&verdict]);
            rb.push("extraction", verdict);
            emit(rb.finish(), out.as_deref());
            code
        }
        Cmd::BuildCounterexample {
            filter,
            set,
            blocking,
            epsilon,
            horizon,
            samples,
            seed,
            out,
        } => {
            let f = parse_filter(&filter);
            let i = parse_set(&set);
            let d = parse_blocking(&blocking);
            let eps = parse_epsilon(&epsilon);
            let horizon = capped_horizon(horizon);
            let inputs = json!({
                "filter": filter_to_json(&f),
                "set": setexpr_to_json(&i),
                "blocking": blocking_to_json(&d),
                "epsilon": epsilon,
                "samples": samples,
            });
            let mut rb = ReportBuilder::new("build-counterexample", inputs, horizon, seed);
            let cx = build_block_counterexample(&f, &i, &d, &eps, 1 << 16, samples, horizon, seed)
                .unwrap_or_else(|e| fail(e));
            let ok = cx.certificate.verify();
            rb.push("block-respecting-refutation", cx.refutation.clone());
            rb.push_extra(
                "weak-convergence",
                serde_json::to_value(&cx.certificate).unwrap(),
            );
            rb.push_extra(
                "assignments",
                serde_json::to_value(&cx.assignments).unwrap(),
            );
            emit(rb.finish(), out.as_deref());
            if ok {
                0
            } else {
                10
            }
        }
        Cmd::Cesaro {
            seq,
            candidate,
            horizon,
            tolerance,
            out,
        } => {
            let s = parse_scalar_seq(&seq);
            let c = filterlab_core::ratio::parse_rational(&candidate)
                .unwrap_or_else(|| usage_error("bad --candidate rational"));
            let tol = parse_epsilon(&tolerance);
            let horizon = capped_horizon(horizon);
            let inputs = json!({
                "seq": seq,
                "candidate": candidate,
                "tolerance": tolerance,
            });
            let mut rb = ReportBuilder::new("cesaro", inputs, horizon, 0);
            let table = strong_cesaro(&s, &c, horizon);
            rb.push_extra("averages", serde_json::to_value(&table).unwrap());
            let verdict = stat_vs_cesaro(&s, &c, horizon, &tol).unwrap_or_else(|e| fail(e));
            let code = exit_code_for(&[&verdict]);
            rb.push("statistical-vs-cesaro", verdict);
            emit(rb.finish(), out.as_deref());
            code
        }
        Cmd::WalshBounds {
            dim,
            samples,
            seed,
            out,
        } => {
            let inputs = json!({ "dim": dim, "samples": samples });
            let mut rb = ReportBuilder::new("walsh-bounds", inputs, samples, seed);
            let (_, report) = walsh_system(dim, samples, seed).unwrap_or_else(|e| fail(e));
            let ok = report.verify();
            rb.push_extra("walsh", serde_json::to_value(&report).unwrap());
            emit(rb.finish(), out.as_deref());
            if ok {
                0
            } else {
                10
            }
        }
        Cmd::VerifyCertificate { input } => {
            let text = std::fs::read_to_string(&input)
                .unwrap_or_else(|e| usage_error(format!("cannot read {input}: {e}")));
            let report: Value = serde_json::from_str(&text).unwrap_or_else(|e| {
                usage_error(format!(
                    "malformed report JSON at line {} column {}: {e}",
                    e.line(),
                    e.column()
                ))
            });
            let failures = verify::verify_report(&report);
            if failures.is_empty() {
                println!("certificate check passed: every record replays");
                0
            } else {
                for f in &failures {
                    eprintln!("certificate check failed: {f}");
                }
                10
            }
        }
        Cmd::Demo {
            name,
            horizon,
            seed,
            out,
        } => {
            let horizon = capped_horizon(horizon);
            let inputs = json!({ "demo": name });
            let mut rb = ReportBuilder::new(&format!("demo {name}"), inputs, horizon, seed);
            match demos::run_demo(&name, horizon, seed, &mut rb) {
                Ok(ok) => {
                    emit(rb.finish(), out.as_deref());
                    if ok {
                        0
                    } else {
                        10
                    }
                }
                Err(e) => usage_error(e),
            }
        }
    };
    std::process::exit(code);
}
