#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use qpn::network::NetworkFile;
use qpn::{Network, Query, Sign};

/// Rename every node through `map`, keeping structure.
pub fn relabel(net: &Network, query: &Query, map: &BTreeMap<String, String>) -> (Network, Query) {
    let mut file: NetworkFile = net.to_file();
    let m = |s: &str| map[s].clone();
    file.nodes = file.nodes.iter().map(|n| m(n)).collect();
    for a in &mut file.arcs {
        a.from = m(&a.from);
        a.to = m(&a.to);
    }
    for s in &mut file.synergies {
        s.pair = [m(&s.pair[0]), m(&s.pair[1])];
        s.child = m(&s.child);
    }
    let query = Query {
        observed: query.observed.iter().map(|(k, &v)| (m(k), v)).collect(),
        evidence: (m(&query.evidence.0), query.evidence.1),
        interest: m(&query.interest),
    };
    (Network::from_file(&file).unwrap(), query)
}

/// Nodes on some simple trail from the evidence to the interest that the
/// earlier observations do not block, found by listing every trail.
/// Synergy edges are not considered.
pub fn brute_force_relevant(net: &Network, query: &Query) -> BTreeSet<String> {
    let labels: Vec<String> = net.labels().to_vec();
    let idx = |l: &str| labels.iter().position(|x| x == l).unwrap();
    let n = labels.len();
    let mut arcs = BTreeSet::new();
    for a in net.to_file().arcs {
        arcs.insert((idx(&a.from), idx(&a.to)));
    }
    let observed: BTreeSet<usize> = query.observed.keys().map(|l| idx(l)).collect();
    // v or one of its descendants is observed
    let opened: Vec<bool> = (0..n)
        .map(|v| {
            let mut stack = vec![v];
            let mut seen = BTreeSet::new();
            while let Some(u) = stack.pop() {
                if observed.contains(&u) {
                    return true;
                }
                if seen.insert(u) {
                    stack.extend(arcs.iter().filter(|&&(a, _)| a == u).map(|&(_, b)| b));
                }
            }
            false
        })
        .collect();
    let (e, i) = (idx(&query.evidence.0), idx(&query.interest));
    let mut on = BTreeSet::new();
    let mut path = vec![e];
    fn walk(
        path: &mut Vec<usize>,
        target: usize,
        n: usize,
        arcs: &BTreeSet<(usize, usize)>,
        observed: &BTreeSet<usize>,
        opened: &[bool],
        on: &mut BTreeSet<usize>,
    ) {
        let v = *path.last().unwrap();
        if v == target {
            let ok = (1..path.len() - 1).all(|k| {
                let (a, b, c) = (path[k - 1], path[k], path[k + 1]);
                if arcs.contains(&(a, b)) && arcs.contains(&(c, b)) {
                    opened[b]
                } else {
                    !observed.contains(&b)
                }
            });
            if ok {
                on.extend(path.iter().copied());
            }
            return;
        }
        for w in 0..n {
            if !path.contains(&w) && (arcs.contains(&(v, w)) || arcs.contains(&(w, v))) {
                path.push(w);
                walk(path, target, n, arcs, observed, opened, on);
                path.pop();
            }
        }
    }
    walk(&mut path, i, n, &arcs, &observed, &opened, &mut on);
    on.into_iter().map(|v| labels[v].clone()).collect()
}

/// The sign tables, row operand first, in the order + - 0 ?.
pub const ORDER: [Sign; 4] = [Sign::Plus, Sign::Minus, Sign::Zero, Sign::Ambiguous];

pub fn table_product() -> [[&'static str; 4]; 4] {
    [
        ["+", "-", "0", "?"],
        ["-", "+", "0", "?"],
        ["0", "0", "0", "0"],
        ["?", "?", "0", "?"],
    ]
}

pub fn table_sum() -> [[&'static str; 4]; 4] {
    [
        ["+", "?", "+", "?"],
        ["?", "-", "-", "?"],
        ["+", "-", "0", "?"],
        ["?", "?", "?", "?"],
    ]
}
