//! Sign propagation: the effect of one new observation on every node's sign.
//!
//! A node's sign is the sign-sum, over every simple reasoning chain from the
//! observed node, of the sign-product of the influences along that chain.
//! Messages travel along arcs in either direction and along induced
//! intercausal edges, never through an observed node and never from one
//! parent of a node to another through that node.

use std::collections::BTreeMap;
use std::fmt::Write as _;


use crate::chains::{Blocking, LinkGraph, LinkKind};
use crate::error::Result;
use crate::network::{Network, NodeId, ProductSynergy};
use crate::query::Query;
use crate::sign::Sign;

/// Undirected influence between two parents of an observed common child.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntercausalEdge {
    pub endpoints: (NodeId, NodeId),
    pub sign: Sign,
    pub source: ProductSynergy,
}

/// One edge per synergy whose child is observed with the synergy's value.
pub fn induce_intercausal(net: &Network, observed: &BTreeMap<NodeId, bool>) -> Vec<IntercausalEdge> {
    net.synergies()
        .iter()
        .filter(|s| observed.get(&s.child) == Some(&s.value))
        .map(|s| IntercausalEdge { endpoints: s.pair, sign: s.sign, source: *s })
        .collect()
}

/// Propagated sign per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignMap {
    signs: Vec<Sign>,
}

impl SignMap {
    pub fn get(&self, id: NodeId) -> Sign {
        self.signs[id.0]
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, Sign)> + '_ {
        self.signs.iter().enumerate().map(|(i, &s)| (NodeId(i), s))
    }

    /// Sign by label, `None` for labels not in `net`.
    pub fn sign_of(&self, net: &Network, label: &str) -> Option<Sign> {
        net.id(label).map(|id| self.get(id))
    }

    pub fn named(&self, net: &Network) -> BTreeMap<String, Sign> {
        self.iter().map(|(id, s)| (net.label(id).to_string(), s)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Message {
    pub from: NodeId,
    pub to: NodeId,
    pub sign: Sign,
}

#[derive(Debug, Clone, Default)]
pub struct PropagationTrace {
    /// Every message in the order it was sent.
    pub messages: Vec<Message>,
    /// Messages received per node.
    pub visits: Vec<usize>,
    /// How often each node's sign changed, seeding included.
    pub sign_changes: Vec<usize>,
}

impl PropagationTrace {
    pub fn max_sign_changes(&self) -> usize {
        self.sign_changes.iter().copied().max().unwrap_or(0)
    }

    /// One `from -> to : sign` line per message.
    pub fn render(&self, net: &Network) -> String {
        let mut out = String::new();
        for m in &self.messages {
            let _ = writeln!(out, "{} -> {} : {}", net.label(m.from), net.label(m.to), m.sign);
        }
        out
    }
}

/// Propagate the query's new evidence. Earlier observations block chains
/// and, together with the evidence, induce intercausal edges.
pub fn propagate(net: &Network, query: &Query) -> Result<(SignMap, PropagationTrace)> {
    propagate_with_order(net, query, None)
}

/// As [`propagate`], visiting neighbours in the order of `order` (labels)
/// instead of ascending label order. Labels missing from `order` go last.
pub fn propagate_with_order(
    net: &Network,
    query: &Query,
    order: Option<&[&str]>,
) -> Result<(SignMap, PropagationTrace)> {
    let q = query.bind_strict(net)?;
    let observed = q.all_observed();
    let propagator = Propagator::new(net, &observed);
    let rank = order.map(|order| {
        let mut rank = vec![usize::MAX; net.len()];
        for (i, l) in order.iter().enumerate() {
            if let Some(id) = net.id(l) {
                rank[id.0] = i;
            }
        }
        rank
    });
    Ok(propagator.run(q.evidence, Sign::of_value(q.evidence_value), rank.as_deref()))
}

/// Sign at `target` after seeding `source` with `seed`, treating `observed`
/// (which should include the evidence node) as fixed context. `source` is
/// clamped: nothing flows back into it.
pub fn net_influence(
    net: &Network,
    source: &str,
    seed: Sign,
    target: &str,
    observed: &BTreeMap<String, bool>,
) -> Result<Sign> {
    let source = net.require(source)?;
    let target = net.require(target)?;
    let observed = observed
        .iter()
        .map(|(l, &v)| Ok((net.require(l)?, v)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(influence(net, source, seed, &observed).get(target))
}

pub(crate) fn influence(
    net: &Network,
    source: NodeId,
    seed: Sign,
    observed: &BTreeMap<NodeId, bool>,
) -> SignMap {
    Propagator::new(net, observed).run(source, seed, None).0
}

pub(crate) struct Propagator<'a> {
    net: &'a Network,
    graph: LinkGraph,
    observed: Vec<bool>,
}

impl<'a> Propagator<'a> {
    pub fn new(net: &'a Network, observed: &BTreeMap<NodeId, bool>) -> Propagator<'a> {
        let edges = induce_intercausal(net, observed);
        let mut mask = vec![false; net.len()];
        for &id in observed.keys() {
            mask[id.0] = true;
        }
        Propagator { net, graph: LinkGraph::new(net, &edges), observed: mask }
    }

    pub fn run(&self, source: NodeId, seed: Sign, rank: Option<&[usize]>) -> (SignMap, PropagationTrace) {
        let n = self.net.len();
        let mut run = Run {
            signs: vec![Sign::Zero; n],
            trace: PropagationTrace {
                messages: Vec::new(),
                visits: vec![0; n],
                sign_changes: vec![0; n],
            },
            on_path: vec![false; n],
        };
        if seed != Sign::Zero {
            run.signs[source.0] = seed;
            run.trace.sign_changes[source.0] = 1;
        }
        // the source never receives, whether or not it is observed
        let mut observed = self.observed.clone();
        observed[source.0] = true;
        run.on_path[source.0] = true;
        let links: Vec<Vec<_>> = self
            .net
            .nodes()
            .map(|v| {
                let mut l = self.graph.links(v).to_vec();
                if let Some(rank) = rank {
                    l.sort_by_key(|l| (rank[l.to.0], l.to, l.kind));
                }
                l
            })
            .collect();
        let blocking = Blocking::Reasoning { observed: &observed };
        run.send_on(&links, blocking, source, None, seed);
        (SignMap { signs: run.signs }, run.trace)
    }
}

struct Run {
    signs: Vec<Sign>,
    trace: PropagationTrace,
    on_path: Vec<bool>,
}

impl Run {
    fn send_on(
        &mut self,
        links: &[Vec<crate::chains::Link>],
        blocking: Blocking<'_>,
        v: NodeId,
        arrived: Option<LinkKind>,
        carried: Sign,
    ) {
        for link in &links[v.0] {
            let to = link.to;
            if self.on_path[to.0] {
                continue;
            }
            if let Blocking::Reasoning { observed } = blocking {
                if observed[to.0] {
                    continue;
                }
            }
            if let Some(kind) = arrived {
                if !blocking.passes(v, kind, link.kind) {
                    continue;
                }
            }
            let message = carried * link.sign;
            if message == Sign::Zero {
                continue;
            }
            self.trace.messages.push(Message { from: v, to, sign: message });
            self.trace.visits[to.0] += 1;
            let updated = self.signs[to.0] + message;
            if updated != self.signs[to.0] {
                self.signs[to.0] = updated;
                self.trace.sign_changes[to.0] += 1;
            }
            self.on_path[to.0] = true;
            self.send_on(links, blocking, to, Some(link.kind), message);
            self.on_path[to.0] = false;
        }
    }
}
