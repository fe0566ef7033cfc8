//! Random networks and queries for property checks.

use std::ops::RangeInclusive;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::network::Network;
use crate::query::Query;
use crate::sign::Sign;

#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub nodes: RangeInclusive<usize>,
    /// Arcs per node.
    pub density: RangeInclusive<f64>,
    /// Earlier observations, drawn from root nodes only.
    pub max_observed: usize,
    /// Chance that an arc gets sign 0 instead of + or -.
    pub zero_arcs: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec { nodes: 4..=12, density: 1.2..=2.0, max_observed: 2, zero_arcs: 0.0 }
    }
}

/// A random DAG over labels `V00`, `V01`, ...; the topological order is a
/// random permutation of the labels.
pub fn random_network(rng: &mut impl Rng, nodes: usize, density: f64, zero_arcs: f64) -> Network {
    let labels: Vec<String> = (0..nodes).map(|i| format!("V{i:02}")).collect();
    let mut order: Vec<usize> = (0..nodes).collect();
    order.shuffle(rng);
    let pairs: Vec<(usize, usize)> =
        (0..nodes).flat_map(|a| (a + 1..nodes).map(move |b| (a, b))).collect();
    let arcs = ((nodes as f64 * density).round() as usize).min(pairs.len());
    let mut builder = Network::builder().nodes(labels.iter().map(String::as_str));
    for &(a, b) in pairs.choose_multiple(rng, arcs) {
        let sign = if rng.gen_bool(zero_arcs) {
            Sign::Zero
        } else if rng.gen_bool(0.5) {
            Sign::Plus
        } else {
            Sign::Minus
        };
        builder = builder.arc(&labels[order[a]], &labels[order[b]], sign);
    }
    builder.build().expect("arcs follow a topological order")
}

/// Evidence and interest are distinct random nodes; up to `max_observed`
/// other root nodes are observed beforehand.
pub fn random_query(rng: &mut impl Rng, net: &Network, max_observed: usize) -> Query {
    let labels = net.labels();
    let mut picks = labels.iter().collect::<Vec<_>>();
    picks.shuffle(rng);
    let (evidence, interest) = (picks[0], picks[1]);
    let count = rng.gen_range(0..=max_observed);
    let observed: Vec<(&str, bool)> = net
        .nodes()
        .filter(|&v| net.in_degree(v) == 0)
        .map(|v| net.label(v))
        .filter(|l| l != evidence && l != interest)
        .choose_multiple(rng, count)
        .into_iter()
        .map(|l| (l, rng.gen_bool(0.5)))
        .collect();
    Query::new(observed, (evidence.as_str(), rng.gen_bool(0.5)), interest)
}

/// `count` (network, query) pairs, deterministic per seed.
pub fn sample(seed: u64, count: usize, spec: &CorpusSpec) -> Vec<(Network, Query)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(spec.nodes.clone());
            let density = rng.gen_range(spec.density.clone());
            let net = random_network(&mut rng, n, density, spec.zero_arcs);
            let query = random_query(&mut rng, &net, spec.max_observed);
            (net, query)
        })
        .collect()
}
