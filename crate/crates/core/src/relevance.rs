//! The relevant network: the part of a network lying on unblocked chains
//! between the new evidence and the node of interest.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::chains::{nodes_on_chains, observation_masks, Blocking, LinkGraph};
use crate::error::{Error, Result};
use crate::network::{Network, NodeId};
use crate::propagation::induce_intercausal;
use crate::query::{BoundQuery, Query};
use crate::separation::d_separated;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RelevanceClass {
    /// Not d-separated from the interest node given all observations.
    pub structural: bool,
    /// Requisite for computing the interest node's posterior.
    pub computational: bool,
    /// Part of the relevant network for the evidence and interest.
    pub dynamic: bool,
}

/// Requisite nodes for `interest` given `observed`, by bouncing a ball
/// from the interest node: nodes whose tables are needed plus the observed
/// nodes the ball reaches.
pub fn bayes_ball(net: &Network, observed: &BTreeSet<NodeId>, interest: NodeId) -> Result<BTreeSet<NodeId>> {
    if observed.contains(&interest) {
        return Err(Error::InvalidQuery(format!("interest node `{}` is observed", net.label(interest))));
    }
    let n = net.len();
    let obs: Vec<bool> = (0..n).map(|i| observed.contains(&NodeId(i))).collect();
    let (mut visited, mut top, mut bottom) = (vec![false; n], vec![false; n], vec![false; n]);
    let mut schedule = VecDeque::from([(interest, true)]);
    while let Some((j, from_child)) = schedule.pop_front() {
        visited[j.0] = true;
        let (pass_up, pass_down) = match (from_child, obs[j.0]) {
            (true, true) => (false, false),
            (true, false) => (true, true),
            (false, true) => (true, false),
            (false, false) => (false, true),
        };
        if pass_up && !top[j.0] {
            top[j.0] = true;
            schedule.extend(net.parents(j).iter().map(|&(p, _)| (p, true)));
        }
        if pass_down && !bottom[j.0] {
            bottom[j.0] = true;
            schedule.extend(net.children(j).iter().map(|&(c, _)| (c, false)));
        }
    }
    Ok((0..n).filter(|&i| top[i] || (obs[i] && visited[i])).map(NodeId).collect())
}

/// Nodes on some chain from the evidence to the interest node that is not
/// blocked by the earlier observations. Intercausal edges induced by the
/// observations count as links.
fn chain_nodes(net: &Network, q: &BoundQuery) -> Vec<bool> {
    let edges = induce_intercausal(net, &q.all_observed());
    let graph = LinkGraph::new(net, &edges);
    let (observed, opened) = observation_masks(net, q.observed.keys().copied());
    nodes_on_chains(
        &graph,
        Blocking::DSeparation { observed: &observed, opened: &opened },
        q.evidence,
        q.interest,
    )
}

/// Requisite nodes that lie on no reasoning chain from the evidence to the interest node.
pub fn nuisance_nodes(net: &Network, query: &Query, requisite: &BTreeSet<NodeId>) -> Result<BTreeSet<NodeId>> {
    let q = query.bind_strict(net)?;
    let on_chain = chain_nodes(net, &q);
    Ok(requisite.iter().copied().filter(|&v| v != q.evidence && !on_chain[v.0]).collect())
}

fn relevant_ids(net: &Network, q: &BoundQuery) -> Result<BTreeSet<NodeId>> {
    let mut observed = q.observed_set();
    observed.insert(q.evidence);
    let requisite = bayes_ball(net, &observed, q.interest)?;
    let on_chain = chain_nodes(net, q);
    if !on_chain[q.interest.0] {
        return Err(Error::Disconnected {
            evidence: net.label(q.evidence).to_string(),
            interest: net.label(q.interest).to_string(),
        });
    }
    let mut keep: BTreeSet<NodeId> = requisite.into_iter().filter(|v| on_chain[v.0]).collect();
    keep.insert(q.evidence);
    Ok(keep)
}

/// The relevant network for the query, or [`Error::Disconnected`] when no
/// unblocked chain joins evidence and interest.
pub fn relevant_network(net: &Network, query: &Query) -> Result<Network> {
    let q = query.bind_strict(net)?;
    Ok(net.induced_by_ids(&relevant_ids(net, &q)?))
}

pub fn classify(net: &Network, query: &Query) -> Result<BTreeMap<String, RelevanceClass>> {
    let q = query.bind_strict(net)?;
    let mut observed = q.observed_set();
    observed.insert(q.evidence);
    let requisite = bayes_ball(net, &observed, q.interest)?;
    let dynamic = match relevant_ids(net, &q) {
        Ok(ids) => ids,
        Err(Error::Disconnected { .. }) => BTreeSet::new(),
        Err(e) => return Err(e),
    };
    net.nodes()
        .map(|v| {
            let structural = v == q.interest || !d_separated(net, v, q.interest, &observed)?;
            let class = RelevanceClass {
                structural,
                computational: requisite.contains(&v),
                dynamic: dynamic.contains(&v),
            };
            Ok((net.label(v).to_string(), class))
        })
        .collect()
}
