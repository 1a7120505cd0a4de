//! Gliding-hump extraction: from a coordinate-wise vanishing sequence
//! with norms bounded away from zero over a stationary set, select a
//! stationary subsequence that is a small perturbation of a disjointly
//! supported block system, then certify basis equivalence.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::FilterlabError;
use crate::filters::witness::block_respecting_check;
use crate::filters::{Certificate, FilterHandle, IneqRecord, Relation, Status, Verdict};
use crate::l1seq::SeqGen;
use crate::ratio::format_rational;
use crate::setalg::{Blocking, SetExpr};

use super::perturbation::{perturbation_check, PerturbationReport};

/// Geometric schedule of positive tolerances δ_k = first·ratio^(k−1)
/// with Σδ ≤ ε/8, checked in closed form.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DeltaSchedule {
    pub eps: String,
    pub first: String,
    pub ratio: String,
}

impl DeltaSchedule {
    pub fn geometric(
        eps: BigRational,
        first: BigRational,
        ratio: BigRational,
    ) -> Result<DeltaSchedule, FilterlabError> {
        if eps <= BigRational::zero() || first <= BigRational::zero() {
            return Err(FilterlabError::InvalidArgument(
                "schedule needs positive ε and first term".into(),
            ));
        }
        if ratio <= BigRational::zero() || ratio >= BigRational::one() {
            return Err(FilterlabError::InvalidArgument(
                "geometric ratio must lie strictly between 0 and 1".into(),
            ));
        }
        // Σ first·ratio^k = first/(1−ratio), required ≤ ε/8.
        let total = &first / (BigRational::one() - &ratio);
        let budget = &eps / BigRational::from_integer(8.into());
        if total > budget {
            return Err(FilterlabError::InvalidArgument(format!(
                "schedule sum {} exceeds ε/8 = {}",
                format_rational(&total),
                format_rational(&budget)
            )));
        }
        Ok(DeltaSchedule {
            eps: format_rational(&eps),
            first: format_rational(&first),
            ratio: format_rational(&ratio),
        })
    }

    pub fn eps_value(&self) -> BigRational {
        crate::ratio::parse_rational(&self.eps).expect("constructed from rationals")
    }

    pub fn delta(&self, k: u64) -> BigRational {
        let first = crate::ratio::parse_rational(&self.first).expect("rational");
        let ratio = crate::ratio::parse_rational(&self.ratio).expect("rational");
        let mut out = first;
        for _ in 1..k.max(1) {
            out *= &ratio;
        }
        out
    }
}

/// Everything needed to re-verify an extraction without re-running it:
/// the tail cuts, stage boundaries, selected indices, kept half,
/// coordinate windows, the recorded inequality chain, and the final
/// perturbation report (which embeds the kept vectors).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExtractionCertificate {
    pub seq_name: String,
    pub stationary_set: SetExpr,
    pub schedule: DeltaSchedule,
    /// `(n, m(n))` at the stage boundaries, strictly increasing.
    pub tail_cuts: Vec<(u64, u64)>,
    /// Stage boundaries n_1 < n_2 < … (n_0 = 0 implicit).
    pub stages: Vec<u64>,
    /// One selector pick per stage piece.
    pub selector: Vec<u64>,
    /// The kept (even-indexed) half of the selector.
    pub kept: Vec<u64>,
    /// Coordinate windows of the block system.
    pub windows: Vec<(u64, u64)>,
    pub inequalities: Vec<IneqRecord>,
    pub perturbation: PerturbationReport,
    pub horizon: u64,
}

impl ExtractionCertificate {
    pub fn verify(&self) -> bool {
        self.inequalities.iter().all(|r| r.holds() == Some(true)) && self.perturbation.verify()
    }
}

/// Smallest tail cut `m` with `tail_mass(x, m) < δ`.
fn minimal_tail_cut(x: &crate::l1seq::L1Vec, delta: &BigRational) -> u64 {
    // Walk the support downward accumulating mass until it reaches δ.
    let mut acc = BigRational::zero();
    let support: Vec<(u64, BigRational)> =
        x.iter().map(|(k, v)| (k, v.clone())).collect();
    for (k, v) in support.iter().rev() {
        acc += v.abs();
        if acc >= *delta {
            return k + 1;
        }
    }
    1
}

/// Runs the extraction. Preconditions (rejections, not verdicts):
/// norms strictly above ε on the stationary set, and no coordinate
/// stuck above δ₁ along it.
#[allow(clippy::too_many_arguments)]
pub fn extract_basic_subsequence(
    filter: &FilterHandle,
    seq: &SeqGen,
    stationary_set: &SetExpr,
    schedule: &DeltaSchedule,
    horizon: u64,
    samples: u64,
    seed: u64,
) -> Result<(Verdict, Option<ExtractionCertificate>), FilterlabError> {
    let horizon = horizon.max(1024);
    let eps = schedule.eps_value();
    // Norm precondition on sampled members of I.
    let mut sampled = 0u64;
    for n in 1..=horizon {
        if !stationary_set.member(n) {
            continue;
        }
        sampled += 1;
        if sampled > 200 {
            break;
        }
        let norm_sq = seq.eval(n).norm1_squared();
        if norm_sq <= &eps * &eps {
            return Err(FilterlabError::precondition(
                "norms on the stationary set must exceed ε strictly",
                Some(n),
            ));
        }
    }
    // Coordinate-wise vanishing along I: no coordinate may keep
    // violating δ₁ in the late range.
    let delta1 = schedule.delta(1);
    if let Some((k, hits)) = crate::convergence::coordinate_stuck_along(
        seq,
        stationary_set,
        &delta1,
        horizon.min(20_000),
    ) {
        let late = hits
            .iter()
            .filter(|&&n| n >= horizon.min(20_000) / 2)
            .count();
        if late >= 16 {
            return Err(FilterlabError::precondition(
                format!("coordinate {k} stays large along the stationary set"),
                Some(k),
            ));
        }
    }

    // Tail cuts m(n), strictly increasing, computed on demand. The
    // schedule value is carried along incrementally and frozen past
    // index 64: a smaller δ only pushes the cut higher, which keeps
    // the recorded tail bounds valid.
    let mut m_cache: Vec<u64> = vec![0]; // m(0) = 0
    let mut delta_running = schedule.delta(1);
    let ratio = crate::ratio::parse_rational(&schedule.ratio).expect("rational");
    let mut m_of = |n: u64, seq: &SeqGen| -> u64 {
        while (m_cache.len() as u64) <= n {
            let k = m_cache.len() as u64;
            if k > 1 && k <= 64 {
                delta_running *= &ratio;
            }
            let raw = minimal_tail_cut(&seq.eval(k), &delta_running);
            let prev = *m_cache.last().unwrap();
            m_cache.push(raw.max(prev + 1));
        }
        m_cache[n as usize]
    };

    // Stage boundaries. Support profiles are computed once per index
    // so the per-stage head-mass lookups are binary searches.
    let scan_cap = horizon.min(65_536);
    let profiles: Vec<(Vec<u64>, Vec<BigRational>)> = (1..=scan_cap)
        .map(|j| {
            let x = seq.eval(j);
            let coords: Vec<u64> = x.support().collect();
            let mut prefix = Vec::with_capacity(coords.len());
            let mut acc = BigRational::zero();
            for (_, v) in x.iter() {
                acc += v.abs();
                prefix.push(acc.clone());
            }
            (coords, prefix)
        })
        .collect();
    let head_mass_of = |j: u64, m: u64| -> BigRational {
        let (coords, prefix) = &profiles[(j - 1) as usize];
        let idx = coords.partition_point(|&k| k <= m);
        if idx == 0 {
            BigRational::zero()
        } else {
            prefix[idx - 1].clone()
        }
    };
    let mut stages: Vec<u64> = Vec::new();
    let mut inequalities: Vec<IneqRecord> = Vec::new();
    let first_member = (1..=horizon).find(|&n| stationary_set.member(n));
    let mut current = match first_member {
        Some(n) => n,
        None => {
            return Err(FilterlabError::InvalidArgument(
                "stationary set has no members within the horizon".into(),
            ))
        }
    };
    stages.push(current);
    for stage in 2..=16u64 {
        let prev = *stages.last().unwrap();
        let m_prev = m_of(prev, seq);
        let delta = schedule.delta(stage - 1);
        // Last violation of the head bound within the scan range.
        let mut last_violation = 0u64;
        for j in 1..=scan_cap {
            if head_mass_of(j, m_prev) >= delta {
                last_violation = j;
            }
        }
        let mut next = last_violation.max(prev + 1);
        // The piece (prev, next] must contain a member of I.
        match (prev + 1..=horizon).find(|&n| stationary_set.member(n)) {
            Some(first_in) => next = next.max(first_in),
            None => break,
        }
        if next > horizon / 2 {
            break;
        }
        // Record a sampled head-mass instantiation.
        let probe = next + 1;
        let probe_mass = if probe <= scan_cap {
            head_mass_of(probe, m_prev)
        } else {
            seq.eval(probe).head_mass(m_prev).value
        };
        inequalities.push(IneqRecord::new(
            format!(
                "head mass of x_{probe} below the cut m(n_{}) = {m_prev} stays under δ_{}",
                stage - 1,
                stage - 1
            ),
            &probe_mass,
            Relation::Lt,
            &delta,
        ));
        stages.push(next);
        current = next;
    }
    let _ = current;
    if stages.len() < 4 {
        return Ok((
            Verdict::consistent_note(
                "not enough stages fit under the horizon",
                horizon,
            ),
            None,
        ));
    }

    // Block-respecting selector over the stage blocking of I.
    let blocking = Blocking::derived(stationary_set.clone(), stages.clone())?;
    let br = block_respecting_check(filter, stationary_set, &blocking, horizon)?;
    if !br.is_proved() {
        return Ok((
            Verdict::consistent_note(
                "no stationary selector available for the stage blocking",
                horizon,
            )
            .via("selector request not proved"),
            None,
        ));
    }
    let selector_expr = match &br.certificate {
        Certificate::BlockSelector { selector, .. } => selector.clone(),
        _ => {
            return Ok((
                Verdict::consistent_note("selector certificate missing", horizon),
                None,
            ))
        }
    };
    // Materialize one pick per stage piece.
    let mut selector: Vec<u64> = Vec::new();
    {
        let mut lo = 0u64;
        for &hi in &stages {
            if let Some(j) = (lo + 1..=hi).find(|&v| selector_expr.member(v)) {
                selector.push(j);
            }
            lo = hi;
        }
    }
    if selector.len() < stages.len().min(4) {
        return Ok((
            Verdict::consistent_note("selector missed stage pieces", horizon),
            None,
        ));
    }
    // Keep the even half (the odd half would do symmetrically; for the
    // supported filters both halves remain stationary).
    let kept: Vec<u64> = selector.iter().copied().skip(1).step_by(2).collect();
    if kept.len() < 2 {
        return Ok((
            Verdict::consistent_note("kept half too small", horizon),
            None,
        ));
    }

    // Perturbation windows and the recorded inequality chain.
    let mut windows: Vec<(u64, u64)> = Vec::new();
    let mut ys = Vec::new();
    let mut tail_cuts: Vec<(u64, u64)> = Vec::new();
    for (i, &j) in kept.iter().enumerate() {
        let i1 = i as u64 + 1; // block index of y_i
        let lo_stage = 2 * i1 - 2; // n_{2i-2}
        let hi_stage = 2 * i1; // n_{2i}
        let lo = if lo_stage == 0 {
            0
        } else {
            m_of(stages[(lo_stage - 1) as usize], seq)
        };
        let hi_n = stages
            .get((hi_stage - 1) as usize)
            .copied()
            .unwrap_or_else(|| *stages.last().unwrap());
        let hi = m_of(hi_n, seq);
        let y = seq.eval(j);
        let z = y.restrict_window(lo, hi);
        let defect = y.sub(&z).expect("unscaled").norm1().value;
        let delta_j = schedule.delta(j);
        let chain_bound = if lo_stage == 0 {
            delta_j.clone()
        } else {
            schedule.delta(lo_stage) + &delta_j
        };
        inequalities.push(IneqRecord::new(
            format!("perturbation of kept vector {} (index {j}) under the chain bound", i1),
            &defect,
            Relation::Le,
            &chain_bound,
        ));
        let two_delta = BigRational::from_integer(2.into())
            * schedule.delta(if lo_stage == 0 { j } else { lo_stage });
        inequalities.push(IneqRecord::new(
            format!("perturbation of kept vector {} within twice the schedule", i1),
            &defect,
            Relation::Le,
            &two_delta,
        ));
        tail_cuts.push((hi_n, hi));
        windows.push((lo, hi));
        ys.push(y);
    }

    // Lemma-style equivalence constants on the kept system.
    let eps0 = ys
        .iter()
        .map(|y| y.norm1().value)
        .min()
        .expect("kept non-empty");
    let perturbation = perturbation_check(&ys, &windows, &eps, &eps0, samples, seed)?;

    let all_hold = inequalities.iter().all(|r| r.holds() == Some(true));
    let certificate = ExtractionCertificate {
        seq_name: seq.name.clone(),
        stationary_set: stationary_set.clone(),
        schedule: schedule.clone(),
        tail_cuts,
        stages,
        selector,
        kept,
        windows,
        inequalities,
        perturbation,
        horizon,
    };
    let status = if all_hold && certificate.perturbation.violations == 0 {
        Status::Proved
    } else {
        Status::Consistent
    };
    let verdict = Verdict {
        status,
        certificate: Certificate::Via {
            label: format!(
                "extraction over {} stages, kept {} vectors, c1 = {}",
                certificate.stages.len(),
                certificate.kept.len(),
                certificate.perturbation.c1
            ),
            inner: Box::new(br),
        },
        horizon,
    };
    Ok((verdict, Some(certificate)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::l1seq::{canonical_basis, perturbed_basis};
    use crate::ratio::rat;

    fn schedule() -> DeltaSchedule {
        DeltaSchedule::geometric(rat(1, 2), rat(1, 32), rat(1, 2)).unwrap()
    }

    #[test]
    fn schedule_validation() {
        assert!(DeltaSchedule::geometric(rat(1, 2), rat(1, 4), rat(1, 2)).is_err());
        assert!(DeltaSchedule::geometric(rat(1, 2), rat(1, 32), rat(3, 2)).is_err());
        let s = schedule();
        assert_eq!(s.delta(1), rat(1, 32));
        assert_eq!(s.delta(3), rat(1, 128));
    }

    #[test]
    fn canonical_basis_extracts_with_zero_perturbations() {
        let (verdict, cert) = extract_basic_subsequence(
            &FilterHandle::Frechet,
            &canonical_basis(),
            &SetExpr::naturals(),
            &schedule(),
            1 << 14,
            200,
            5,
        )
        .unwrap();
        assert!(verdict.is_proved());
        let cert = cert.unwrap();
        assert!(cert.verify());
        assert_eq!(cert.perturbation.worst_ratio, "1");
    }

    #[test]
    fn perturbed_basis_extraction() {
        let (verdict, cert) = extract_basic_subsequence(
            &FilterHandle::Frechet,
            &perturbed_basis(),
            &SetExpr::naturals(),
            &schedule(),
            1 << 16,
            300,
            7,
        )
        .unwrap();
        assert!(verdict.is_proved());
        let cert = cert.unwrap();
        assert!(cert.verify());
        assert!(cert.kept.len() >= 2);
        // c₁ = 1 − ε/ε₀ with ε₀ = min kept norm > 1.
        assert!(cert.perturbation.verify());
    }

    #[test]
    fn stuck_coordinate_rejected() {
        use crate::l1seq::user_defined;
        use std::sync::Arc;
        // x_n = e_1 + e_n: coordinate 1 never fades.
        let seq = user_defined(
            "stuck",
            Arc::new(|n| {
                crate::l1seq::L1Vec::basis(1)
                    .add(&crate::l1seq::L1Vec::basis(n.max(2)))
                    .unwrap()
            }),
        );
        let err = extract_basic_subsequence(
            &FilterHandle::Frechet,
            &seq,
            &SetExpr::naturals(),
            &schedule(),
            1 << 14,
            50,
            1,
        )
        .unwrap_err();
        assert!(matches!(err, FilterlabError::Precondition { .. }));
    }

    #[test]
    fn small_norms_rejected() {
        use crate::l1seq::user_defined;
        use std::sync::Arc;
        let seq = user_defined(
            "tiny",
            Arc::new(|n| crate::l1seq::L1Vec::basis(n).scale(&rat(1, 4))),
        );
        let err = extract_basic_subsequence(
            &FilterHandle::Frechet,
            &seq,
            &SetExpr::naturals(),
            &schedule(),
            4096,
            50,
            1,
        )
        .unwrap_err();
        assert!(matches!(err, FilterlabError::Precondition { .. }));
    }
}
