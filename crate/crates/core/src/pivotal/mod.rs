//! Pivotal pruning: locate the node where the trade-off behind an ambiguous
//! interest sign is decided, and say which resolvers, with which relative
//! strengths, would settle it.

mod explanation;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

pub use explanation::{Branch, BranchOutcome, Explanation, ResolverChainSign, Term};

use crate::chains::{observation_masks, for_each_chain, render_chain, Blocking, LinkGraph};
use crate::error::Error;
use crate::network::{Network, NodeId};
use crate::propagation::{induce_intercausal, influence, propagate};
use crate::query::{BoundQuery, Query};
use crate::relevance::relevant_network;
use crate::sign::Sign;

#[derive(Debug, thiserror::Error)]
pub enum PivotError {
    #[error("sign of `{interest}` is {sign}: nothing to explain")]
    NoAmbiguity { interest: String, sign: Sign },

    #[error("ambiguous influence {tail} -> {head}: pivotal pruning needs unambiguous arcs")]
    AmbiguousInfluence { tail: String, head: String },

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error(transparent)]
    Model(#[from] Error),
}

pub type PivotResult<T> = Result<T, PivotError>;

/// Articulation nodes between evidence and interest, nearest the evidence
/// first, with the interest appended last.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateOrder {
    pub nodes: Vec<String>,
}

impl CandidateOrder {
    pub fn interest(&self) -> &str {
        self.nodes.last().expect("candidate order ends with the interest")
    }
}

/// Undirected view including the intercausal edges induced by `O ∪ {E}`.
fn query_graph(net: &Network, q: &BoundQuery) -> LinkGraph {
    LinkGraph::new(net, &induce_intercausal(net, &q.all_observed()))
}

fn adjacency(graph: &LinkGraph) -> Vec<Vec<usize>> {
    (0..graph.len()).map(|v| graph.neighbours(NodeId(v)).map(|w| w.0).collect()).collect()
}

/// Cut vertices by iterative Hopcroft–Tarjan low-link DFS.
fn cut_vertices(adj: &[Vec<usize>]) -> BTreeSet<usize> {
    let n = adj.len();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut cut = BTreeSet::new();
    let mut time = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        // (node, parent, next neighbour index)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        while let Some(&mut (v, parent, ref mut next)) = stack.last_mut() {
            if let Some(&w) = adj[v].get(*next) {
                *next += 1;
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else if w != parent {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if parent != root && low[v] >= disc[parent] {
                        cut.insert(parent);
                    }
                }
            }
        }
        if root_children > 1 {
            cut.insert(root);
        }
    }
    cut
}

/// Nodes whose removal disconnects the undirected view of `net`.
pub fn articulation_nodes(net: &Network) -> BTreeSet<String> {
    let graph = LinkGraph::new(net, &[]);
    net.label_set(cut_vertices(&adjacency(&graph)).into_iter().map(NodeId))
}

/// Breadth-first parents from `from`, never entering `avoid`.
fn bfs(adj: &[Vec<usize>], from: usize, avoid: Option<usize>) -> Vec<Option<usize>> {
    let mut parent = vec![None; adj.len()];
    parent[from] = Some(from);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if parent[w].is_none() && Some(w) != avoid {
                parent[w] = Some(v);
                queue.push_back(w);
            }
        }
    }
    parent
}

fn candidate_ids(net: &Network, q: &BoundQuery) -> PivotResult<Vec<NodeId>> {
    let adj = adjacency(&query_graph(net, q));
    let (e, i) = (q.evidence.0, q.interest.0);
    let parent = bfs(&adj, e, None);
    if parent[i].is_none() {
        return Err(Error::Disconnected {
            evidence: net.label(q.evidence).to_string(),
            interest: net.label(q.interest).to_string(),
        }
        .into());
    }
    // witness trail, evidence first
    let mut witness = vec![i];
    while let Some(&v) = witness.last() {
        if v == e {
            break;
        }
        witness.push(parent[v].unwrap());
    }
    witness.reverse();
    let cut = cut_vertices(&adj);
    let mut order = Vec::new();
    for &v in &witness[1..witness.len() - 1] {
        if bfs(&adj, e, Some(v))[i].is_none() {
            if !cut.contains(&v) {
                return Err(PivotError::Internal(format!(
                    "`{}` separates evidence from interest but is no articulation node",
                    net.label(NodeId(v))
                )));
            }
            order.push(NodeId(v));
        }
    }
    // every separator lies on every trail, hence on the witness and in the
    // same order; double-check the order against distance from the evidence
    let dist = |v: usize| {
        let mut d = 0;
        let mut u = v;
        while u != e {
            u = parent[u].unwrap();
            d += 1;
        }
        d
    };
    if order.windows(2).any(|w| dist(w[0].0) >= dist(w[1].0)) {
        return Err(PivotError::Internal("articulation nodes out of trail order".into()));
    }
    order.push(q.interest);
    Ok(order)
}

/// Articulation nodes that separate evidence from interest, in trail order,
/// followed by the interest.
pub fn candidate_order(rel: &Network, query: &Query) -> PivotResult<CandidateOrder> {
    let q = query.bind(rel)?;
    let ids = candidate_ids(rel, &q)?;
    Ok(CandidateOrder { nodes: ids.into_iter().map(|id| rel.label(id).to_string()).collect() })
}

fn reject_ambiguous(net: &Network, q: &BoundQuery) -> PivotResult<()> {
    if let Some(arc) = net.arcs().iter().find(|a| a.sign.is_ambiguous()) {
        return Err(PivotError::AmbiguousInfluence {
            tail: net.label(arc.tail).to_string(),
            head: net.label(arc.head).to_string(),
        });
    }
    if let Some(e) = induce_intercausal(net, &q.all_observed()).iter().find(|e| e.sign.is_ambiguous()) {
        return Err(PivotError::AmbiguousInfluence {
            tail: net.label(e.endpoints.0).to_string(),
            head: net.label(e.endpoints.1).to_string(),
        });
    }
    Ok(())
}

fn ambiguous_interest(rel: &Network, q: &BoundQuery) -> PivotResult<()> {
    let observed = q.all_observed();
    let sign = influence(rel, q.evidence, Sign::of_value(q.evidence_value), &observed).get(q.interest);
    if sign.is_ambiguous() {
        Ok(())
    } else {
        Err(PivotError::NoAmbiguity { interest: rel.label(q.interest).to_string(), sign })
    }
}

fn pivot_id(rel: &Network, q: &BoundQuery, order: &[NodeId]) -> PivotResult<NodeId> {
    let observed = q.all_observed();
    // candidate 0 is the evidence, seeded with its observed sign
    let candidates: Vec<NodeId> = std::iter::once(q.evidence).chain(order.iter().copied()).collect();
    let m = candidates.len() - 1;
    for i in (0..m).rev() {
        let seed = if i == 0 { Sign::of_value(q.evidence_value) } else { Sign::Plus };
        let signs = influence(rel, candidates[i], seed, &observed);
        if signs.get(candidates[i + 1]).is_ambiguous() {
            return Ok(candidates[i + 1]);
        }
        if signs.get(q.interest).is_ambiguous() {
            return Err(PivotError::Internal(format!(
                "`{}` unambiguous but `{}` ambiguous when seeding `{}`",
                rel.label(candidates[i + 1]),
                rel.label(q.interest),
                rel.label(candidates[i]),
            )));
        }
    }
    Err(PivotError::Internal("interest ambiguous yet no candidate is".into()))
}

/// The node nearest the evidence whose unambiguous sign would fix the
/// interest's sign.
pub fn compute_pivot(rel: &Network, query: &Query) -> PivotResult<String> {
    let q = query.bind(rel)?;
    reject_ambiguous(rel, &q)?;
    ambiguous_interest(rel, &q)?;
    let order = candidate_ids(rel, &q)?;
    Ok(rel.label(pivot_id(rel, &q, &order)?).to_string())
}

/// `query` re-aimed at `interest`, keeping only observations of nodes in `net`.
fn local_query(net: &Network, query: &Query, interest: &str) -> Query {
    query.with_interest(interest).restricted_to(net)
}

/// The part of `rel` on the evidence side of `pivot`, pivot included.
pub fn pruned_network(rel: &Network, pivot: &str, query: &Query) -> PivotResult<Network> {
    let q = query.bind(rel)?;
    let p = rel.require(pivot)?;
    if p == q.interest {
        return Ok(rel.clone());
    }
    let adj = adjacency(&query_graph(rel, &q));
    let reached = bfs(&adj, q.evidence.0, Some(p.0));
    let keep: BTreeSet<NodeId> =
        (0..rel.len()).filter(|&v| reached[v].is_some() || v == p.0).map(NodeId).collect();
    Ok(rel.induced_by_ids(&keep))
}

/// The evidence, plus every other ambiguous node with at least two parents.
pub fn candidate_resolvers(
    pruned: &Network,
    pivot: &str,
    signs: &BTreeMap<String, Sign>,
    query: &Query,
) -> PivotResult<BTreeSet<String>> {
    let q = local_query(pruned, query, pivot).bind(pruned)?;
    let p = pruned.require(pivot)?;
    let mut resolvers = BTreeSet::from([pruned.label(q.evidence).to_string()]);
    for v in pruned.nodes() {
        let label = pruned.label(v);
        if v != p && pruned.in_degree(v) >= 2 && signs.get(label).is_some_and(|s| s.is_ambiguous()) {
            resolvers.insert(label.to_string());
        }
    }
    Ok(resolvers)
}

/// Reasoning chains from the evidence to `pivot`, as node and link lists.
fn evidence_chains(net: &Network, q: &BoundQuery, pivot: NodeId) -> Vec<(Vec<NodeId>, Vec<crate::chains::Link>)> {
    let graph = query_graph(net, q);
    let (observed, _) = observation_masks(net, q.all_observed().into_keys());
    let mut chains = Vec::new();
    for_each_chain(&graph, Blocking::Reasoning { observed: &observed }, q.evidence, pivot, |n, l| {
        chains.push((n.to_vec(), l.to_vec()))
    });
    chains
}

/// Resolvers that reach the pivot along some evidence chain without another
/// resolver in between: on each chain, the resolver nearest the pivot.
pub fn resolution_frontier(
    pruned: &Network,
    pivot: &str,
    resolvers: &BTreeSet<String>,
    query: &Query,
) -> PivotResult<BTreeSet<String>> {
    let q = local_query(pruned, query, pivot).bind(pruned)?;
    let p = pruned.require(pivot)?;
    let mut frontier = BTreeSet::new();
    for (nodes, _) in evidence_chains(pruned, &q, p) {
        // the evidence starts every chain, so some resolver is always found
        if let Some(&r) = nodes[..nodes.len() - 1].iter().rev().find(|&&v| resolvers.contains(pruned.label(v))) {
            frontier.insert(pruned.label(r).to_string());
        }
    }
    Ok(frontier)
}

/// Sign of every distinct subchain from a frontier member to the pivot that
/// meets no other frontier member.
pub fn chain_signs(
    pruned: &Network,
    frontier: &BTreeSet<String>,
    pivot: &str,
    query: &Query,
) -> PivotResult<Vec<ResolverChainSign>> {
    let q = local_query(pruned, query, pivot).bind(pruned)?;
    let p = pruned.require(pivot)?;
    let mut seen: BTreeMap<String, BTreeMap<String, (Vec<String>, Sign)>> = BTreeMap::new();
    for (nodes, links) in evidence_chains(pruned, &q, p) {
        let Some(k) = nodes[..nodes.len() - 1].iter().rposition(|&v| frontier.contains(pruned.label(v))) else {
            continue;
        };
        let sign: Sign = links[k..].iter().map(|l| l.sign).product();
        let rendered = render_chain(pruned, &nodes[k..], &links[k..]);
        let labels = nodes[k..].iter().map(|&v| pruned.label(v).to_string()).collect();
        seen.entry(pruned.label(nodes[k]).to_string()).or_default().insert(rendered, (labels, sign));
    }
    let mut out = Vec::new();
    for (resolver, chains) in seen {
        for (j, (chain, (nodes, sign))) in chains.into_iter().enumerate() {
            out.push(ResolverChainSign { resolver: resolver.clone(), chain_index: j + 1, chain, nodes, sign });
        }
    }
    Ok(out)
}

/// One branch per assignment of `+`/`-` to the frontier members; members
/// in `fixed` (the evidence) keep their given sign. Terms of sign 0 drop out.
pub fn construct_result(
    chain_signs: &[ResolverChainSign],
    frontier: &BTreeSet<String>,
    fixed: &BTreeMap<String, Sign>,
) -> Vec<Branch> {
    let free: Vec<&String> = frontier.iter().filter(|r| !fixed.contains_key(*r)).collect();
    let mut branches = Vec::with_capacity(1 << free.len());
    for mask in 0..1usize << free.len() {
        let mut assignment: BTreeMap<String, Sign> =
            fixed.iter().filter(|(r, _)| frontier.contains(*r)).map(|(r, &s)| (r.clone(), s)).collect();
        for (bit, r) in free.iter().enumerate() {
            // the first member is the most significant; + before -
            let minus = mask >> (free.len() - 1 - bit) & 1 == 1;
            assignment.insert((*r).clone(), if minus { Sign::Minus } else { Sign::Plus });
        }
        let (mut positive, mut negative) = (Vec::new(), Vec::new());
        for c in chain_signs {
            let Some(&s) = assignment.get(&c.resolver) else { continue };
            let term = Term { resolver: c.resolver.clone(), chain_index: c.chain_index, chain: c.chain.clone(), sign: s * c.sign };
            match term.sign {
                Sign::Plus => positive.push(term),
                Sign::Minus => negative.push(term),
                _ => {}
            }
        }
        let outcome = match (positive.is_empty(), negative.is_empty()) {
            (true, true) => BranchOutcome::Determined { sign: Sign::Zero },
            (false, true) => BranchOutcome::Determined { sign: Sign::Plus },
            (true, false) => BranchOutcome::Determined { sign: Sign::Minus },
            (false, false) => BranchOutcome::Conditional { positive, negative },
        };
        branches.push(Branch { assignment, outcome });
    }
    branches
}

/// The separating articulation node nearest the interest whose propagated
/// sign is unambiguous.
pub fn boundary_node(rel: &Network, query: &Query, signs: &BTreeMap<String, Sign>) -> PivotResult<Option<String>> {
    let order = candidate_order(rel, query)?;
    let between = &order.nodes[..order.nodes.len() - 1];
    Ok(between.iter().rev().find(|v| signs.get(*v).is_some_and(|s| !s.is_ambiguous())).cloned())
}

/// Explain an ambiguous interest sign; with `depth > 0`, also explain each
/// ambiguous frontier member, recursing at most `depth` levels.
pub fn pivotal_pruning(net: &Network, query: &Query, depth: usize) -> PivotResult<Explanation> {
    let rel = relevant_network(net, query)?;
    explain_relevant(&rel, query, depth)
}

fn explain_relevant(rel: &Network, query: &Query, depth: usize) -> PivotResult<Explanation> {
    let q = query.bind(rel)?;
    reject_ambiguous(rel, &q)?;
    ambiguous_interest(rel, &q)?;
    let order = candidate_ids(rel, &q)?;
    let p = pivot_id(rel, &q, &order)?;
    let pivot = rel.label(p).to_string();
    let evidence = rel.label(q.evidence).to_string();
    let seed = Sign::of_value(q.evidence_value);

    let (rel_signs, _) = propagate(rel, &query.restricted_to(rel))?;
    let rel_signs = rel_signs.named(rel);
    let boundary = boundary_node(rel, query, &rel_signs)?;

    let pruned = pruned_network(rel, &pivot, query)?;
    let (signs, _) = propagate(&pruned, &local_query(&pruned, query, &pivot))?;
    let signs = signs.named(&pruned);
    let resolvers = candidate_resolvers(&pruned, &pivot, &signs, query)?;
    let frontier = resolution_frontier(&pruned, &pivot, &resolvers, query)?;
    let chains = chain_signs(&pruned, &frontier, &pivot, query)?;
    let fixed = BTreeMap::from([(evidence.clone(), seed)]);
    let branches = construct_result(&chains, &frontier, &fixed);

    let pivot_to_interest = if p == q.interest {
        Sign::Plus
    } else {
        influence(rel, p, Sign::Plus, &q.all_observed()).get(q.interest)
    };
    if pivot_to_interest.is_ambiguous() {
        return Err(PivotError::Internal(format!("pivot `{pivot}` does not determine the interest")));
    }

    let mut notes = Vec::new();
    if frontier.contains(&evidence) {
        notes.push(format!("{evidence} is the evidence: its sign is fixed at {seed}"));
    }
    if chains.iter().any(|c| c.sign == Sign::Zero) {
        notes.push("chains of sign 0 contribute nothing and are left out of the branches".into());
    }
    notes.push("a resolver with sign 0 contributes nothing: drop its terms".into());
    if branches.iter().any(|b| matches!(b.outcome, BranchOutcome::Conditional { .. })) {
        notes.push("equal strengths resolve to +".into());
    }
    if let Some(b) = &boundary {
        notes.push(format!("explanation region lies between pivot {pivot} and boundary {b}"));
    }

    let mut children = Vec::new();
    if depth > 0 {
        for r in &frontier {
            if *r == evidence || !signs.get(r).is_some_and(|s| s.is_ambiguous()) {
                continue;
            }
            let sub = local_query(&pruned, query, r);
            match relevant_network(&pruned, &sub).map_err(PivotError::from).and_then(|sub_rel| explain_relevant(&sub_rel, &sub, depth - 1)) {
                Ok(child) => children.push(child),
                Err(PivotError::NoAmbiguity { .. }) => notes.push(format!("{r} is unambiguous on its own relevant network")),
                Err(e) => return Err(e),
            }
        }
    }

    Ok(Explanation {
        interest: rel.label(q.interest).to_string(),
        evidence: (evidence, q.evidence_value),
        pivot,
        candidates: order.iter().map(|&v| rel.label(v).to_string()).collect(),
        boundary,
        frontier: frontier.into_iter().collect(),
        chain_signs: chains,
        branches,
        pivot_to_interest,
        notes,
        children,
    })
}
