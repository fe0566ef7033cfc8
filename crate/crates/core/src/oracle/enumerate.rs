use std::collections::BTreeMap;

use serde::Serialize;

use super::{within_budget, OracleError, Quantification, EPSILON};
use crate::network::{Network, NodeId};
use crate::query::Query;
use crate::sign::Sign;

/// `P(v = true | evidence)` for every node, by summing the full joint.
pub fn posteriors(
    net: &Network,
    quant: &Quantification,
    evidence: &BTreeMap<NodeId, bool>,
) -> Result<Vec<f64>, OracleError> {
    within_budget(net)?;
    let n = net.len();
    let free: Vec<usize> = (0..n).filter(|&i| !evidence.contains_key(&NodeId(i))).collect();
    let mut assignment = vec![false; n];
    for (&v, &value) in evidence {
        assignment[v.index()] = value;
    }
    let mut mass = vec![0.0; n];
    let mut total = 0.0;
    for bits in 0..1usize << free.len() {
        for (k, &i) in free.iter().enumerate() {
            assignment[i] = bits >> k & 1 == 1;
        }
        let joint: f64 = net
            .nodes()
            .map(|v| {
                let p = quant.p_true(net, v, &assignment);
                if assignment[v.index()] { p } else { 1.0 - p }
            })
            .product();
        total += joint;
        for (m, &on) in mass.iter_mut().zip(&assignment) {
            if on {
                *m += joint;
            }
        }
    }
    if total <= 0.0 {
        return Err(OracleError::ImpossibleEvidence);
    }
    Ok(mass.into_iter().map(|m| m / total).collect())
}

pub fn exact_posterior(
    net: &Network,
    quant: &Quantification,
    evidence: &BTreeMap<NodeId, bool>,
    target: NodeId,
) -> Result<f64, OracleError> {
    Ok(posteriors(net, quant, evidence)?[target.index()])
}

/// How one node's probability of being true moves when the evidence is added.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorDelta {
    pub node: String,
    /// Given the earlier observations only.
    pub before: f64,
    /// Given the earlier observations and the evidence.
    pub after: f64,
    pub direction: Sign,
}

impl PosteriorDelta {
    pub fn new(node: String, before: f64, after: f64) -> PosteriorDelta {
        let direction = if after > before + EPSILON {
            Sign::Plus
        } else if after < before - EPSILON {
            Sign::Minus
        } else {
            Sign::Zero
        };
        PosteriorDelta { node, before, after, direction }
    }

    pub fn delta(&self) -> f64 {
        self.after - self.before
    }
}

/// Deltas for every node, in node order.
pub fn posterior_deltas(
    net: &Network,
    quant: &Quantification,
    query: &Query,
) -> Result<Vec<PosteriorDelta>, OracleError> {
    let q = query.bind_strict(net)?;
    let before = posteriors(net, quant, &q.observed)?;
    let after = posteriors(net, quant, &q.all_observed())?;
    Ok(net
        .nodes()
        .map(|v| PosteriorDelta::new(net.label(v).to_string(), before[v.index()], after[v.index()]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::oracle::quantify;

    #[test]
    fn single_node_prior() {
        let net = Network::builder().node("A").build().unwrap();
        let quant = Quantification::from_tables(&net, vec![vec![0.3]]).unwrap();
        let p = exact_posterior(&net, &quant, &BTreeMap::new(), net.require("A").unwrap()).unwrap();
        assert!((p - 0.3).abs() < 1e-15);
    }

    #[test]
    fn deterministic_arc() {
        let net = Network::builder().nodes(["A", "B"]).arc("A", "B", Sign::Plus).build().unwrap();
        let (a, b) = (net.require("A").unwrap(), net.require("B").unwrap());
        let quant = Quantification::from_tables(&net, vec![vec![0.5], vec![0.0, 1.0]]).unwrap();
        assert_eq!(exact_posterior(&net, &quant, &BTreeMap::from([(a, true)]), b).unwrap(), 1.0);
        let q = Query::new([], ("A", false), "B");
        let deltas = posterior_deltas(&net, &quant, &q).unwrap();
        assert_eq!(deltas[1].direction, Sign::Minus);
        assert!((deltas[1].before - 0.5).abs() < 1e-15);
    }

    #[test]
    fn impossible_evidence() {
        let net = Network::builder().nodes(["A", "B"]).arc("A", "B", Sign::Plus).build().unwrap();
        let quant = Quantification::from_tables(&net, vec![vec![0.0], vec![0.0, 1.0]]).unwrap();
        let a = net.require("A").unwrap();
        assert!(matches!(
            posteriors(&net, &quant, &BTreeMap::from([(a, true)])),
            Err(OracleError::ImpossibleEvidence)
        ));
    }

    #[test]
    fn posteriors_are_probabilities() {
        let net = fixtures::trade_off();
        let quant = quantify(&net, 1).unwrap();
        let h = net.require("H").unwrap();
        for p in posteriors(&net, &quant, &BTreeMap::from([(h, true)])).unwrap() {
            assert!((0.0..=1.0).contains(&p));
        }
    }
}
