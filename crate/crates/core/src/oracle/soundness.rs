use std::fmt::{self, Write as _};

use serde::Serialize;

use super::{posterior_deltas, quantify, within_budget, OracleError};
use crate::network::Network;
use crate::propagation::propagate;
use crate::query::Query;
use crate::sign::Sign;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Consistent,
    /// The propagated sign is `?`: any direction is fine.
    Unconstrained,
    Counterexample,
}

impl Verdict {
    fn judge(propagated: Sign, direction: Sign) -> Verdict {
        match propagated {
            Sign::Ambiguous => Verdict::Unconstrained,
            // weak reading: a signed influence may leave a node unmoved
            Sign::Plus | Sign::Minus if direction == propagated || direction == Sign::Zero => Verdict::Consistent,
            Sign::Zero if direction == Sign::Zero => Verdict::Consistent,
            _ => Verdict::Counterexample,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::Unconstrained => "unconstrained",
            Verdict::Counterexample => "counterexample",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialLine {
    pub seed: u64,
    pub node: String,
    pub propagated: Sign,
    pub direction: Sign,
    pub delta: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SoundnessReport {
    pub trials: usize,
    /// Seeds whose quantification failed, with the reason.
    pub skipped: Vec<(u64, String)>,
    pub lines: Vec<TrialLine>,
    pub counterexamples: usize,
}

impl SoundnessReport {
    /// Directions observed at `node` across all trials.
    pub fn directions(&self, node: &str) -> impl Iterator<Item = Sign> + '_ {
        let node = node.to_string();
        self.lines.iter().filter(move |l| l.node == node).map(|l| l.direction)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            let _ = writeln!(out, "{}, {}, {}, {}, {}", l.seed, l.node, l.propagated, l.direction, l.verdict);
        }
        for (seed, why) in &self.skipped {
            let _ = writeln!(out, "{seed}, skipped: {why}");
        }
        let _ = writeln!(
            out,
            "trials: {}, skipped: {}, counterexamples: {}",
            self.trials,
            self.skipped.len(),
            self.counterexamples
        );
        out
    }
}

/// Quantify `net` `trials` times (seeds `seed`, `seed + 1`, ...) and compare
/// every node's posterior shift with its propagated sign.
pub fn check_soundness(net: &Network, query: &Query, trials: usize, seed: u64) -> Result<SoundnessReport, OracleError> {
    check_against(net, net, query, trials, seed)
}

/// As [`check_soundness`], but propagate on `net` while drawing tables from
/// `truth`, which must have the same nodes. A sign in `net` that disagrees
/// with `truth` should then surface as counterexamples.
pub fn check_against(
    net: &Network,
    truth: &Network,
    query: &Query,
    trials: usize,
    seed: u64,
) -> Result<SoundnessReport, OracleError> {
    within_budget(net)?;
    if net.labels() != truth.labels() {
        return Err(crate::error::Error::InvalidQuery("reference network has different nodes".into()).into());
    }
    let (signs, _) = propagate(net, query)?;
    let net = truth;
    let mut report = SoundnessReport { trials, skipped: Vec::new(), lines: Vec::new(), counterexamples: 0 };
    for t in 0..trials as u64 {
        let s = seed.wrapping_add(t);
        let quant = match quantify(net, s) {
            Ok(q) => q,
            Err(e @ OracleError::Infeasible { .. }) => {
                report.skipped.push((s, e.to_string()));
                continue;
            }
            Err(e) => return Err(e),
        };
        let deltas = match posterior_deltas(net, &quant, query) {
            Ok(d) => d,
            Err(e @ OracleError::ImpossibleEvidence) => {
                report.skipped.push((s, e.to_string()));
                continue;
            }
            Err(e) => return Err(e),
        };
        for (v, d) in net.nodes().zip(deltas) {
            let propagated = signs.get(v);
            let verdict = Verdict::judge(propagated, d.direction);
            if verdict == Verdict::Counterexample {
                report.counterexamples += 1;
            }
            report.lines.push(TrialLine {
                seed: s,
                node: d.node.clone(),
                propagated,
                direction: d.direction,
                delta: d.delta(),
                verdict,
            });
        }
    }
    Ok(report)
}
