//! Blocked chains and d-separation on the plain DAG.

use std::collections::{BTreeSet, VecDeque};

use crate::chains::observation_masks;
use crate::error::{Error, Result};
use crate::network::{Network, NodeId};

/// Whether `chain` (a simple trail, arcs taken in either direction) is
/// blocked by `observed`: it contains an observed node that is not
/// head-to-head, or a head-to-head node that is unobserved and has no
/// observed descendant.
pub fn chain_blocked(net: &Network, chain: &[NodeId], observed: &BTreeSet<NodeId>) -> Result<bool> {
    let distinct: BTreeSet<_> = chain.iter().collect();
    if distinct.len() != chain.len() {
        return Err(Error::NotATrail("a node repeats".into()));
    }
    for w in chain.windows(2) {
        if net.arc_sign(w[0], w[1]).is_none() && net.arc_sign(w[1], w[0]).is_none() {
            return Err(Error::NotATrail(format!(
                "{} and {} are not adjacent",
                net.label(w[0]),
                net.label(w[1])
            )));
        }
    }
    let (_, opened) = observation_masks(net, observed.iter().copied());
    for w in chain.windows(3) {
        let (prev, v, next) = (w[0], w[1], w[2]);
        let head_to_head = net.arc_sign(prev, v).is_some() && net.arc_sign(next, v).is_some();
        let blocks = if head_to_head { !opened[v.0] } else { observed.contains(&v) };
        if blocks {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Whether every trail between `x` and `y` is blocked by `observed`.
/// An observed endpoint is d-separated from everything.
pub fn d_separated(net: &Network, x: NodeId, y: NodeId, observed: &BTreeSet<NodeId>) -> Result<bool> {
    if x == y {
        return Err(Error::InvalidQuery(format!("d-separation of `{}` from itself", net.label(x))));
    }
    if observed.contains(&x) || observed.contains(&y) {
        return Ok(true);
    }
    Ok(!d_connected_from(net, x, observed)[y.0])
}

/// Nodes d-connected to `x` given `observed` (active-trail reachability).
pub(crate) fn d_connected_from(net: &Network, x: NodeId, observed: &BTreeSet<NodeId>) -> Vec<bool> {
    let (obs, opened) = observation_masks(net, observed.iter().copied());
    // state: (node, arrived from a child?)
    let mut seen = vec![[false; 2]; net.len()];
    let mut reached = vec![false; net.len()];
    let mut queue = VecDeque::from([(x, true)]);
    while let Some((v, from_child)) = queue.pop_front() {
        if std::mem::replace(&mut seen[v.0][from_child as usize], true) {
            continue;
        }
        if !obs[v.0] {
            reached[v.0] = true;
        }
        let up = if from_child { !obs[v.0] } else { opened[v.0] };
        let down = !obs[v.0];
        if up {
            queue.extend(net.parents(v).iter().map(|&(p, _)| (p, true)));
        }
        if down {
            queue.extend(net.children(v).iter().map(|&(c, _)| (c, false)));
        }
    }
    reached[x.0] = false;
    reached
}
