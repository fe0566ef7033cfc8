//! Undirected view of a network (arcs plus induced intercausal edges) and
//! enumeration of simple chains under a blocking rule.

use crate::network::{Network, NodeId};
use crate::propagation::IntercausalEdge;
use crate::sign::Sign;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum LinkKind {
    /// Against an arc: the neighbour is a parent.
    ToParent,
    /// Along an arc: the neighbour is a child.
    ToChild,
    Intercausal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Link {
    pub to: NodeId,
    pub kind: LinkKind,
    pub sign: Sign,
}

#[derive(Debug, Clone)]
pub(crate) struct LinkGraph {
    adj: Vec<Vec<Link>>,
}

impl LinkGraph {
    pub fn new(net: &Network, edges: &[IntercausalEdge]) -> LinkGraph {
        let mut adj = vec![Vec::new(); net.len()];
        for arc in net.arcs() {
            adj[arc.tail.0].push(Link { to: arc.head, kind: LinkKind::ToChild, sign: arc.sign });
            adj[arc.head.0].push(Link { to: arc.tail, kind: LinkKind::ToParent, sign: arc.sign });
        }
        for e in edges {
            let (a, b) = e.endpoints;
            adj[a.0].push(Link { to: b, kind: LinkKind::Intercausal, sign: e.sign });
            adj[b.0].push(Link { to: a, kind: LinkKind::Intercausal, sign: e.sign });
        }
        for links in &mut adj {
            links.sort_by_key(|l| (l.to, l.kind));
        }
        LinkGraph { adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn links(&self, v: NodeId) -> &[Link] {
        &self.adj[v.0]
    }

    /// Neighbours in the undirected view, deduplicated.
    pub fn neighbours(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let links = &self.adj[v.0];
        links
            .iter()
            .enumerate()
            .filter(move |&(i, l)| i == 0 || links[i - 1].to != l.to)
            .map(|(_, l)| l.to)
    }
}

/// Whether a chain may pass through an intermediate node.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Blocking<'a> {
    /// Reasoning chains along which signs propagate: never through an
    /// observed node and never head-to-head through a node.
    Reasoning { observed: &'a [bool] },
    /// Standard d-separation: an observed node blocks unless head-to-head,
    /// where it (or an observed descendant) opens the chain.
    DSeparation { observed: &'a [bool], opened: &'a [bool] },
}

impl Blocking<'_> {
    /// `arrived` is the kind of the link used to reach `v`, seen from the
    /// previous node; `leave` is the kind of the next link, seen from `v`.
    pub fn passes(&self, v: NodeId, arrived: LinkKind, leave: LinkKind) -> bool {
        let head_to_head = arrived == LinkKind::ToChild && leave == LinkKind::ToParent;
        match *self {
            Blocking::Reasoning { observed } => !observed[v.0] && !head_to_head,
            Blocking::DSeparation { observed, opened } => {
                if head_to_head {
                    opened[v.0]
                } else {
                    !observed[v.0]
                }
            }
        }
    }
}

/// Flags for `observed` and for nodes that are observed or have an observed descendant.
pub(crate) fn observation_masks(
    net: &Network,
    observed: impl IntoIterator<Item = NodeId>,
) -> (Vec<bool>, Vec<bool>) {
    let mut obs = vec![false; net.len()];
    let mut opened = vec![false; net.len()];
    let mut stack = Vec::new();
    for v in observed {
        obs[v.0] = true;
        if !opened[v.0] {
            opened[v.0] = true;
            stack.push(v);
        }
    }
    while let Some(v) = stack.pop() {
        for &(p, _) in net.parents(v) {
            if !opened[p.0] {
                opened[p.0] = true;
                stack.push(p);
            }
        }
    }
    (obs, opened)
}

/// Call `visit` with every simple unblocked chain from `start` to `target`
/// as (nodes, links) where `links[i]` leads from `nodes[i]` to `nodes[i+1]`.
pub(crate) fn for_each_chain(
    graph: &LinkGraph,
    blocking: Blocking<'_>,
    start: NodeId,
    target: NodeId,
    mut visit: impl FnMut(&[NodeId], &[Link]),
) {
    if start == target {
        return;
    }
    let mut on_path = vec![false; graph.len()];
    let mut nodes = vec![start];
    let mut links: Vec<Link> = Vec::new();
    on_path[start.0] = true;
    // explicit stack of next-link cursors, one per node on the path
    let mut cursor = vec![0usize];
    while let Some(&pos) = cursor.last() {
        let v = *nodes.last().unwrap();
        let out = graph.links(v);
        if pos >= out.len() || v == target {
            if v == target {
                visit(&nodes, &links);
            }
            cursor.pop();
            nodes.pop();
            on_path[v.0] = false;
            links.pop();
            continue;
        }
        *cursor.last_mut().unwrap() += 1;
        let link = out[pos];
        if on_path[link.to.0] {
            continue;
        }
        if let Some(prev) = links.last() {
            if !blocking.passes(v, prev.kind, link.kind) {
                continue;
            }
        }
        on_path[link.to.0] = true;
        nodes.push(link.to);
        links.push(link);
        cursor.push(0);
    }
}

/// Nodes lying on at least one simple unblocked chain from `start` to `target`.
pub(crate) fn nodes_on_chains(
    graph: &LinkGraph,
    blocking: Blocking<'_>,
    start: NodeId,
    target: NodeId,
) -> Vec<bool> {
    let mut on = vec![false; graph.len()];
    for_each_chain(graph, blocking, start, target, |nodes, _| {
        for v in nodes {
            on[v.0] = true;
        }
    });
    on
}

/// Render a chain as `A->B<-C--D` (`--` marks an intercausal edge).
pub(crate) fn render_chain(net: &Network, nodes: &[NodeId], links: &[Link]) -> String {
    let mut out = String::from(net.label(nodes[0]));
    for (link, &next) in links.iter().zip(&nodes[1..]) {
        out.push_str(match link.kind {
            LinkKind::ToChild => "->",
            LinkKind::ToParent => "<-",
            LinkKind::Intercausal => "--",
        });
        out.push_str(net.label(next));
    }
    out
}
