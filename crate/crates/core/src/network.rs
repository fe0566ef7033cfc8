//! The signed DAG: nodes, qualitative influences and product synergies.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sign::Sign;

/// Index of a node within one [`Network`]. Indices follow label order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub(crate) usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InfluenceArc {
    pub tail: NodeId,
    pub head: NodeId,
    pub sign: Sign,
}

/// `X^sign({a, b}, child = value)`; `pair.0 < pair.1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductSynergy {
    pub pair: (NodeId, NodeId),
    pub child: NodeId,
    pub value: bool,
    pub sign: Sign,
}

/// On-disk form of a network.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub arcs: Vec<ArcEntry>,
    #[serde(default)]
    pub synergies: Vec<SynergyEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcEntry {
    pub from: String,
    pub to: String,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynergyEntry {
    pub pair: [String; 2],
    pub child: String,
    pub value: bool,
    pub sign: Sign,
}

/// A broken network invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Violation {
    DuplicateNode { node: String },
    UnknownNode { node: String, referenced_by: String },
    SelfLoop { node: String },
    DuplicateArc { from: String, to: String },
    Cycle { nodes: Vec<String> },
    BadSynergy { pair: [String; 2], child: String, reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateNode { node } => write!(f, "duplicate-node: {node}"),
            Violation::UnknownNode { node, referenced_by } => {
                write!(f, "unknown-node: {node} (in {referenced_by})")
            }
            Violation::SelfLoop { node } => write!(f, "self-loop: {node}"),
            Violation::DuplicateArc { from, to } => write!(f, "duplicate-arc: {from}->{to}"),
            Violation::Cycle { nodes } => write!(f, "cycle: {}", nodes.join(",")),
            Violation::BadSynergy { pair, child, reason } => {
                write!(f, "bad-synergy: {{{},{}}} on {child}: {reason}", pair[0], pair[1])
            }
        }
    }
}

/// Check every structural invariant of a network description.
///
/// Returns an empty list iff the description can be turned into a [`Network`].
pub fn validate(file: &NetworkFile) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut seen = BTreeSet::new();
    for node in &file.nodes {
        if !seen.insert(node.as_str()) {
            violations.push(Violation::DuplicateNode { node: node.clone() });
        }
    }
    let known = |name: &str, referenced_by: String, out: &mut Vec<Violation>| {
        let ok = seen.contains(name);
        if !ok {
            out.push(Violation::UnknownNode { node: name.to_string(), referenced_by });
        }
        ok
    };

    let mut arcs: BTreeSet<(&str, &str)> = BTreeSet::new();
    for arc in &file.arcs {
        let what = format!("arc {}->{}", arc.from, arc.to);
        let a = known(&arc.from, what.clone(), &mut violations);
        let b = known(&arc.to, what, &mut violations);
        if !(a && b) {
            continue;
        }
        if arc.from == arc.to {
            violations.push(Violation::SelfLoop { node: arc.from.clone() });
        } else if !arcs.insert((arc.from.as_str(), arc.to.as_str())) {
            violations.push(Violation::DuplicateArc { from: arc.from.clone(), to: arc.to.clone() });
        }
    }

    if let Some(cycle) = find_cycle(&seen, &arcs) {
        violations.push(Violation::Cycle { nodes: cycle });
    }

    for syn in &file.synergies {
        let what = format!("synergy on {}", syn.child);
        let ok = [&syn.pair[0], &syn.pair[1], &syn.child]
            .into_iter()
            .fold(true, |acc, n| known(n, what.clone(), &mut violations) & acc);
        if !ok {
            continue;
        }
        let bad = |reason: String| Violation::BadSynergy {
            pair: syn.pair.clone(),
            child: syn.child.clone(),
            reason,
        };
        if syn.pair[0] == syn.pair[1] {
            violations.push(bad("pair members must differ".into()));
            continue;
        }
        for member in &syn.pair {
            if !arcs.contains(&(member.as_str(), syn.child.as_str())) {
                violations.push(bad(format!("{member} is not a parent of {}", syn.child)));
            }
        }
    }
    violations
}

fn find_cycle(nodes: &BTreeSet<&str>, arcs: &BTreeSet<(&str, &str)>) -> Option<Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for &(a, b) in arcs {
        succ.entry(a).or_default().push(b);
    }
    let mut mark: BTreeMap<&str, Mark> = nodes.iter().map(|&n| (n, Mark::New)).collect();
    for &root in nodes {
        if mark[root] != Mark::New {
            continue;
        }
        // iterative DFS keeping the active path
        let mut path: Vec<(&str, usize)> = vec![(root, 0)];
        mark.insert(root, Mark::Active);
        while let Some(&mut (node, ref mut next)) = path.last_mut() {
            let children = succ.get(node).map(Vec::as_slice).unwrap_or(&[]);
            if let Some(&child) = children.get(*next) {
                *next += 1;
                match mark[child] {
                    Mark::New => {
                        mark.insert(child, Mark::Active);
                        path.push((child, 0));
                    }
                    Mark::Active => {
                        let start = path.iter().position(|&(n, _)| n == child).unwrap();
                        return Some(path[start..].iter().map(|&(n, _)| n.to_string()).collect());
                    }
                    Mark::Done => {}
                }
            } else {
                mark.insert(node, Mark::Done);
                path.pop();
            }
        }
    }
    None
}

/// A validated qualitative probabilistic network. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    arcs: Vec<InfluenceArc>,
    synergies: Vec<ProductSynergy>,
    parents: Vec<Vec<(NodeId, Sign)>>,
    children: Vec<Vec<(NodeId, Sign)>>,
}

impl Network {
    pub fn from_file(file: &NetworkFile) -> Result<Network> {
        let violations = validate(file);
        if !violations.is_empty() {
            return Err(Error::InvalidNetwork(violations));
        }
        let mut labels = file.nodes.clone();
        labels.sort();
        let index: HashMap<String, NodeId> =
            labels.iter().enumerate().map(|(i, l)| (l.clone(), NodeId(i))).collect();

        let mut arcs: Vec<InfluenceArc> = file
            .arcs
            .iter()
            .map(|a| InfluenceArc { tail: index[&a.from], head: index[&a.to], sign: a.sign })
            .collect();
        arcs.sort_by_key(|a| (a.tail, a.head));

        let mut synergies: Vec<ProductSynergy> = file
            .synergies
            .iter()
            .map(|s| {
                let (a, b) = (index[&s.pair[0]], index[&s.pair[1]]);
                ProductSynergy {
                    pair: (a.min(b), a.max(b)),
                    child: index[&s.child],
                    value: s.value,
                    sign: s.sign,
                }
            })
            .collect();
        synergies.sort_by_key(|s| (s.child, s.pair, s.value));
        synergies.dedup_by_key(|s| (s.child, s.pair, s.value));

        let n = labels.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for arc in &arcs {
            parents[arc.head.0].push((arc.tail, arc.sign));
            children[arc.tail.0].push((arc.head, arc.sign));
        }
        Ok(Network { labels, index, arcs, synergies, parents, children })
    }

    pub fn from_json(text: &str) -> Result<Network> {
        let file: NetworkFile = serde_json::from_str(text)?;
        Network::from_file(&file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Network> {
        let text = std::fs::read_to_string(path)?;
        Network::from_json(&text)
    }

    pub fn to_file(&self) -> NetworkFile {
        NetworkFile {
            nodes: self.labels.clone(),
            arcs: self
                .arcs
                .iter()
                .map(|a| ArcEntry {
                    from: self.label(a.tail).to_string(),
                    to: self.label(a.head).to_string(),
                    sign: a.sign,
                })
                .collect(),
            synergies: self
                .synergies
                .iter()
                .map(|s| SynergyEntry {
                    pair: [self.label(s.pair.0).to_string(), self.label(s.pair.1).to_string()],
                    child: self.label(s.child).to_string(),
                    value: s.value,
                    sign: s.sign,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("network serializes")
    }

    pub fn builder() -> NetworkBuilder {
        NetworkBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + Clone {
        (0..self.labels.len()).map(NodeId)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id.0]
    }

    pub fn id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn require(&self, label: &str) -> Result<NodeId> {
        self.id(label).ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    pub fn arcs(&self) -> &[InfluenceArc] {
        &self.arcs
    }

    pub fn synergies(&self) -> &[ProductSynergy] {
        &self.synergies
    }

    /// Parents with the sign of the arc into `id`, in index order.
    pub fn parents(&self, id: NodeId) -> &[(NodeId, Sign)] {
        &self.parents[id.0]
    }

    pub fn children(&self, id: NodeId) -> &[(NodeId, Sign)] {
        &self.children[id.0]
    }

    pub fn in_degree(&self, id: NodeId) -> usize {
        self.parents[id.0].len()
    }

    pub fn arc_sign(&self, tail: NodeId, head: NodeId) -> Option<Sign> {
        self.children[tail.0].iter().find(|&&(c, _)| c == head).map(|&(_, s)| s)
    }

    /// Nodes reachable from `id` along arcs, excluding `id` itself.
    pub fn descendants(&self, id: NodeId) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(v) = stack.pop() {
            for &(c, _) in self.children(v) {
                if seen.insert(c) {
                    stack.push(c);
                }
            }
        }
        seen
    }

    /// The network induced by the given labels: arcs and synergies among them only.
    pub fn induced<'a>(&self, keep: impl IntoIterator<Item = &'a str>) -> Result<Network> {
        let keep: BTreeSet<NodeId> =
            keep.into_iter().map(|l| self.require(l)).collect::<Result<_>>()?;
        Ok(self.induced_by_ids(&keep))
    }

    pub(crate) fn induced_by_ids(&self, keep: &BTreeSet<NodeId>) -> Network {
        let file = self.to_file();
        let kept = |l: &str| self.id(l).is_some_and(|id| keep.contains(&id));
        let sub = NetworkFile {
            nodes: file.nodes.iter().filter(|l| kept(l)).cloned().collect(),
            arcs: file.arcs.into_iter().filter(|a| kept(&a.from) && kept(&a.to)).collect(),
            synergies: file
                .synergies
                .into_iter()
                .filter(|s| kept(&s.pair[0]) && kept(&s.pair[1]) && kept(&s.child))
                .collect(),
        };
        Network::from_file(&sub).expect("induced sub-network of a valid network is valid")
    }

    pub fn label_set(&self, ids: impl IntoIterator<Item = NodeId>) -> BTreeSet<String> {
        ids.into_iter().map(|id| self.label(id).to_string()).collect()
    }
}

/// Convenience builder, mostly for tests and fixtures.
#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    file: NetworkFile,
}

impl NetworkBuilder {
    pub fn node(mut self, label: &str) -> Self {
        self.file.nodes.push(label.to_string());
        self
    }

    pub fn nodes<'a>(mut self, labels: impl IntoIterator<Item = &'a str>) -> Self {
        self.file.nodes.extend(labels.into_iter().map(str::to_string));
        self
    }

    pub fn arc(mut self, from: &str, to: &str, sign: Sign) -> Self {
        self.file.arcs.push(ArcEntry { from: from.into(), to: to.into(), sign });
        self
    }

    pub fn synergy(mut self, pair: [&str; 2], child: &str, value: bool, sign: Sign) -> Self {
        self.file.synergies.push(SynergyEntry {
            pair: [pair[0].into(), pair[1].into()],
            child: child.into(),
            value,
            sign,
        });
        self
    }

    pub fn file(&self) -> &NetworkFile {
        &self.file
    }

    pub fn build(self) -> Result<Network> {
        Network::from_file(&self.file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use Sign::*;

    #[test]
    fn cycle_is_reported() {
        let b = Network::builder().nodes(["A", "B"]).arc("A", "B", Plus).arc("B", "A", Minus);
        let v = validate(b.file());
        assert_eq!(v, vec![Violation::Cycle { nodes: vec!["A".into(), "B".into()] }]);
        assert!(matches!(b.build(), Err(Error::InvalidNetwork(_))));
    }

    #[test]
    fn longer_cycle_is_reported() {
        let b = Network::builder()
            .nodes(["A", "B", "C", "D"])
            .arc("A", "B", Plus)
            .arc("B", "C", Plus)
            .arc("C", "D", Plus)
            .arc("D", "B", Plus);
        let v = validate(b.file());
        assert_eq!(v, vec![Violation::Cycle { nodes: vec!["B".into(), "C".into(), "D".into()] }]);
    }

    #[test]
    fn synergy_needs_both_parents() {
        let b = Network::builder()
            .nodes(["A", "B", "C"])
            .arc("A", "C", Plus)
            .synergy(["A", "B"], "C", true, Minus);
        let v = validate(b.file());
        assert_eq!(v.len(), 1);
        assert!(matches!(&v[0], Violation::BadSynergy { reason, .. } if reason.contains("B is not a parent")));
    }

    #[test]
    fn structural_errors() {
        let b = Network::builder()
            .nodes(["A", "A", "B"])
            .arc("A", "A", Plus)
            .arc("A", "B", Plus)
            .arc("A", "B", Minus)
            .arc("A", "Z", Plus);
        let rules: Vec<String> = validate(b.file()).iter().map(|v| v.to_string()).collect();
        assert_eq!(
            rules,
            vec![
                "duplicate-node: A",
                "self-loop: A",
                "duplicate-arc: A->B",
                "unknown-node: Z (in arc A->Z)",
            ]
        );
    }

    #[test]
    fn fixture_is_valid() {
        assert!(validate(&fixtures::trade_off().to_file()).is_empty());
        assert!(validate(&fixtures::full_example().to_file()).is_empty());
    }

    #[test]
    fn file_round_trip() {
        let net = fixtures::trade_off();
        let again = Network::from_json(&net.to_json()).unwrap();
        assert_eq!(net, again);
    }

    #[test]
    fn loader_reports_position_and_rejects_unknown_fields() {
        let err = Network::from_json("{\"nodes\": [\"A\"],\n \"arcs\": [ {\"from\": \"A\"} ]}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = Network::from_json("{\"nodes\": [], \"bogus\": 1}").unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        let err = Network::from_json(
            r#"{"nodes": ["A", "B"], "arcs": [{"from": "A", "to": "B", "sign": "+"}, {"from": "B", "to": "A", "sign": "+"}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("cycle: A,B"), "{err}");
    }

    #[test]
    fn induced_keeps_only_internal_structure() {
        let net = fixtures::trade_off();
        let sub = net.induced(["I", "D", "G", "C"]).unwrap();
        assert_eq!(sub.len(), 4);
        assert_eq!(sub.arcs().len(), 5);
        let i = sub.require("I").unwrap();
        assert_eq!(sub.in_degree(i), 0);
    }
}
