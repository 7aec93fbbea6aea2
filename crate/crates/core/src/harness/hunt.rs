use serde::Serialize;

use super::campaign::{run_campaign, CampaignConfig, CampaignSummary, CheckStatus};
use crate::bounds::BoundId;
use crate::error::{Error, Result};
use crate::measures::MeasureKind;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HuntCandidate {
    pub state_id: String,
    pub index: usize,
    pub beta: f64,
    pub lhs_pow: f64,
    pub rhs: f64,
    pub margin: f64,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HuntResult {
    pub bound: BoundId,
    /// Exact-input checks below the violation threshold, most negative first.
    pub violations: Vec<HuntCandidate>,
    /// The `k` tightest remaining checks, smallest margin first.
    pub frontier: Vec<HuntCandidate>,
    pub summary: CampaignSummary,
}

fn measure_of(bound: BoundId) -> MeasureKind {
    match bound {
        BoundId::ZhuEof | BoundId::JzszEof | BoundId::Thm3 => MeasureKind::Eof,
        BoundId::Thm4 | BoundId::Thm5 => MeasureKind::Cren,
        _ => MeasureKind::Concurrence,
    }
}

/// Runs a campaign restricted to the measure of `bound` and ranks that
/// bound's checks by margin.
pub fn hunt_counterexamples(config: &CampaignConfig, bound: BoundId, k: usize) -> Result<HuntResult> {
    let needs_four = matches!(bound, BoundId::Thm2 | BoundId::Thm4 | BoundId::Jin);
    let three_only = matches!(bound, BoundId::Jzsz | BoundId::JzszEof);
    if (needs_four && config.n_qubits < 4) || (three_only && config.n_qubits != 3) {
        return Err(Error::Config(format!("bound {bound} is not defined for {} qubits", config.n_qubits)));
    }
    let cfg = CampaignConfig { measures: vec![measure_of(bound)], ..config.clone() };
    let outcome = run_campaign(&cfg)?;

    let mut violations = Vec::new();
    let mut frontier = Vec::new();
    for r in &outcome.reports {
        for c in r.checks.iter().filter(|c| c.bound == bound) {
            let (Some(lhs_pow), Some(rhs), Some(margin)) = (c.lhs_pow, c.rhs, c.margin) else {
                continue;
            };
            let cand = HuntCandidate {
                state_id: r.state_id.clone(),
                index: r.index,
                beta: c.beta,
                lhs_pow,
                rhs,
                margin,
                status: c.status,
            };
            if c.status == CheckStatus::Violation {
                violations.push(cand);
            } else {
                frontier.push(cand);
            }
        }
    }
    let by_margin = |a: &HuntCandidate, b: &HuntCandidate| a.margin.total_cmp(&b.margin).then(a.index.cmp(&b.index));
    violations.sort_by(by_margin);
    frontier.sort_by(by_margin);
    frontier.truncate(k);
    Ok(HuntResult { bound, violations, frontier, summary: outcome.summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::campaign::StateFamily;

    fn cfg(family: StateFamily, betas: Vec<f64>) -> CampaignConfig {
        CampaignConfig { samples: 30, beta_grid: betas, seed: 5, family, ..CampaignConfig::default() }
    }

    #[test]
    fn zhu_saturates_on_gsd_without_lambda_one_four() {
        let res = hunt_counterexamples(&cfg(StateFamily::GsdSaturating, vec![2.0]), BoundId::Zhu, 5).unwrap();
        assert!(res.violations.is_empty());
        assert_eq!(res.frontier.len(), 5);
        for c in &res.frontier {
            assert!(c.margin.abs() < 1e-12, "{c:?}");
        }
    }

    #[test]
    fn lemma2_on_balanced_gsd_has_no_violations() {
        let res = hunt_counterexamples(&cfg(StateFamily::GsdBalanced, vec![4.0, 6.0]), BoundId::Thm1, 3).unwrap();
        assert!(res.violations.is_empty());
        assert!(res.frontier.windows(2).all(|w| w[0].margin <= w[1].margin));
        assert!(res.frontier[0].margin >= 0.0);
    }

    #[test]
    fn structural_mismatch_is_rejected() {
        assert!(hunt_counterexamples(&cfg(StateFamily::Haar, vec![4.0]), BoundId::Thm2, 3).is_err());
    }
}
