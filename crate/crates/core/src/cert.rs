//! Independent certificate checking.
//!
//! Everything here re-validates recorded data — inequality records,
//! counts, selector properties, layer tables — by direct evaluation,
//! without re-running the decision procedures that produced them.

use crate::filters::witness::BaseChain;
use crate::filters::{Certificate, Verdict};
use crate::l1seq::{L1Vec, SeqGen};
use crate::ratio::parse_rational;
use crate::setalg::{Blocking, SetExpr};

/// Walks a verdict tree and replays every numeric record it carries.
/// Returns human-readable failure descriptions (empty = all good).
pub fn verify_verdict_numeric(verdict: &Verdict) -> Vec<String> {
    let mut failures = Vec::new();
    walk(&verdict.certificate, &mut failures);
    failures
}

fn walk(cert: &Certificate, failures: &mut Vec<String>) {
    match cert {
        Certificate::Inequalities { records } => {
            for r in records {
                if r.holds() != Some(true) {
                    failures.push(format!("inequality failed: {} ({} {:?} {})", r.label, r.lhs, r.relation, r.rhs));
                }
            }
        }
        Certificate::SublinearComplement { checkpoints, bound }
        | Certificate::MemberDensityZero { checkpoints, bound } => {
            for (n, count, limit) in checkpoints {
                if count > limit {
                    failures.push(format!(
                        "count {count} exceeds bound {limit} at {n} ({bound})"
                    ));
                }
            }
        }
        Certificate::SelectorRefutation {
            checkpoints,
            density_ratio,
            min_selector_count,
            min_selector_horizon,
            ..
        } => {
            for (n, pieces, bound) in checkpoints {
                if pieces > bound {
                    failures.push(format!("piece count {pieces} exceeds log bound {bound} at {n}"));
                }
            }
            match parse_rational(density_ratio) {
                Some(r) => {
                    let expect = crate::ratio::rat(
                        *min_selector_count as i64,
                        (*min_selector_horizon).max(1) as i64,
                    );
                    if r != expect {
                        failures.push("density ratio does not match the recorded count".into());
                    }
                }
                None => failures.push("unparsable density ratio".into()),
            }
        }
        Certificate::StrongDiagonal { picks, layers, .. } => {
            if picks.len() != layers.len() {
                failures.push("pick/layer tables differ in length".into());
            }
            if picks.windows(2).any(|w| w[0] >= w[1]) {
                failures.push("picks are not strictly increasing".into());
            }
            let mut finite: Vec<u64> = layers.iter().copied().filter(|&l| l != u64::MAX).collect();
            let len_before = finite.len();
            finite.dedup();
            if finite.len() != len_before {
                failures.push("a layer is hit twice".into());
            }
            if finite.windows(2).any(|w| w[0] >= w[1]) {
                failures.push("finite layers are not strictly increasing".into());
            }
        }
        Certificate::BlockSelector { stationarity, .. } => walk(&stationarity.certificate, failures),
        Certificate::DiagonalWitness {
            excesses,
            stationarity,
            ..
        } => {
            for (n, observed, allowed) in excesses {
                if observed > allowed {
                    failures.push(format!(
                        "diagonal excess {observed} over the allowance {allowed} at chain index {n}"
                    ));
                }
            }
            walk(&stationarity.certificate, failures);
        }
        Certificate::SplitWitness {
            first_stationary,
            second_stationary,
            ..
        } => {
            walk(&first_stationary.certificate, failures);
            walk(&second_stationary.certificate, failures);
        }
        Certificate::AllOf { parts } | Certificate::AnyOf { parts } => {
            for (_, v) in parts {
                walk(&v.certificate, failures);
            }
        }
        Certificate::Negated { inner } | Certificate::Via { inner, .. } => {
            walk(&inner.certificate, failures)
        }
        Certificate::GoodSet { membership, .. } => walk(&membership.certificate, failures),
        _ => {}
    }
}

/// Re-checks a block-respecting witness: the selector takes at most one
/// point per piece over the horizon, and takes it inside the ground set.
pub fn reverify_block_selector(
    selector: &SetExpr,
    blocking: &Blocking,
    horizon: u64,
) -> Result<u64, String> {
    let mut blocks_checked = 0;
    for piece in blocking.pieces() {
        if piece.lo > horizon || blocks_checked >= 4096 {
            break;
        }
        let members: Vec<u64> = (piece.lo..=piece.hi.min(horizon))
            .filter(|&v| selector.member(v))
            .collect();
        if members.len() > 1 {
            return Err(format!(
                "selector takes {} points in piece {}",
                members.len(),
                piece.index
            ));
        }
        if let Some(&v) = members.first() {
            if !blocking.ground().member(v) {
                return Err(format!("selected point {v} is outside the ground set"));
            }
        }
        blocks_checked += 1;
    }
    Ok(blocks_checked)
}

/// Re-derives the layer table of a strongly diagonal witness from the
/// chain definition and compares it with the recorded one.
pub fn reverify_layer_table(
    picks: &[u64],
    layers: &[u64],
    chain: &BaseChain,
) -> Result<(), String> {
    if picks.len() != layers.len() {
        return Err("pick/layer tables differ in length".into());
    }
    for (&j, &recorded) in picks.iter().zip(layers) {
        use crate::filters::witness::Layer;
        let expect = match chain.layer_of(j) {
            Layer::Zero => 0,
            Layer::Finite(l) => l,
            Layer::Unbounded => u64::MAX,
        };
        if expect != recorded {
            return Err(format!(
                "layer of {j} recomputes to {expect}, recorded {recorded}"
            ));
        }
    }
    Ok(())
}

/// The named deterministic sequences, reconstructible from their names
/// in certificates.
pub fn named_sequence(name: &str) -> Option<SeqGen> {
    match name {
        "canonical" => Some(crate::l1seq::canonical_basis()),
        "remark" => Some(crate::l1seq::remark_sequence()),
        "perturbed" => Some(crate::l1seq::perturbed_basis()),
        "injective" => Some(crate::l1seq::injective_basis(false)),
        "injective-plus" => Some(crate::l1seq::injective_basis(true)),
        _ => None,
    }
}

/// Deep re-check of a perturbation report: re-draws the coefficient
/// vectors from the recorded seed and replays the equivalence bounds on
/// the embedded vectors by direct evaluation.
pub fn reverify_perturbation(
    report: &crate::constructions::PerturbationReport,
) -> Result<(), String> {
    use num_rational::BigRational;
    use num_traits::{One, Signed, Zero};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    let ys: Vec<L1Vec> = report
        .vectors
        .iter()
        .map(|v| L1Vec::from_json(v).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    if ys.len() != report.blocks.len() {
        return Err("vector/window tables differ in length".into());
    }
    let eps = parse_rational(&report.eps).ok_or("bad ε")?;
    let eps0 = parse_rational(&report.eps0).ok_or("bad ε₀")?;
    let c1 = parse_rational(&report.c1).ok_or("bad c₁")?;
    if c1 != BigRational::one() - &eps / &eps0 {
        return Err("c₁ does not equal 1 − ε/ε₀".into());
    }
    // Precondition replay.
    let half_eps = &eps / BigRational::from_integer(2.into());
    for (y, &(lo, hi)) in ys.iter().zip(&report.blocks) {
        if y.norm1().value < eps0 {
            return Err("a norm dips under the declared ε₀".into());
        }
        let defect = y.sub(&y.restrict_window(lo, hi)).unwrap().norm1().value;
        if defect >= half_eps {
            return Err("a perturbation reaches ε/2".into());
        }
    }
    // Sample replay with the recorded seed.
    let mut rng = ChaCha8Rng::seed_from_u64(report.seed);
    for _ in 0..report.samples {
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
        for (a, y) in coeffs.iter().zip(&ys) {
            combo = combo.add(&y.scale(a)).unwrap();
            weighted += a.abs() * y.norm1().value;
        }
        let lhs = combo.norm1().value;
        if !(&c1 * &weighted <= lhs && lhs <= weighted) {
            return Err("an equivalence bound fails on replay".into());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{IneqRecord, Relation, Status};
    use crate::setalg::Choice;

    #[test]
    fn tampered_inequality_detected() {
        let good = Verdict::proved(
            Certificate::Inequalities {
                records: vec![IneqRecord {
                    label: "fine".into(),
                    lhs: "1/3".into(),
                    relation: Relation::Lt,
                    rhs: "1/2".into(),
                }],
            },
            100,
        );
        assert!(verify_verdict_numeric(&good).is_empty());
        let bad = Verdict::proved(
            Certificate::Inequalities {
                records: vec![IneqRecord {
                    label: "tampered".into(),
                    lhs: "2/3".into(),
                    relation: Relation::Lt,
                    rhs: "1/2".into(),
                }],
            },
            100,
        );
        assert_eq!(verify_verdict_numeric(&bad).len(), 1);
    }

    #[test]
    fn selector_reverification() {
        let selector = SetExpr::Selector {
            blocking: Box::new(Blocking::Dyadic),
            choice: Choice::Min,
        };
        assert!(reverify_block_selector(&selector, &Blocking::Dyadic, 1 << 12).is_ok());
        // Two points per block: rejected.
        let doubled = SetExpr::finite([1, 2, 3]);
        assert!(reverify_block_selector(&doubled, &Blocking::Dyadic, 64).is_err());
    }

    #[test]
    fn layer_table_reverification() {
        let chain = BaseChain::Tails { step: 2 };
        // j = 3 has layer 1, j = 5 layer 2, j = 9 layer 4.
        assert!(reverify_layer_table(&[3, 5, 9], &[1, 2, 4], &chain).is_ok());
        assert!(reverify_layer_table(&[3, 5], &[1, 3], &chain).is_err());
    }

    #[test]
    fn strong_diagonal_consistency_checks() {
        let v = Verdict {
            status: Status::Proved,
            certificate: Certificate::StrongDiagonal {
                picks: vec![3, 5, 7],
                layers: vec![1, 2, 2],
                layer_bound_checked: 100,
                base_sets_met: 3,
                stationarity: Box::new(Verdict::proved(Certificate::None, 10)),
            },
            horizon: 10,
        };
        // Layer 2 hit twice.
        assert!(!verify_verdict_numeric(&v).is_empty());
    }
}
