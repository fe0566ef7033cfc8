//! Numeric ground truth: random sign-consistent probability tables and exact
//! posteriors by enumerating the joint distribution.

mod enumerate;
mod soundness;
mod strength;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use enumerate::{exact_posterior, posterior_deltas, posteriors, PosteriorDelta};
pub use soundness::{check_against, check_soundness, SoundnessReport, TrialLine, Verdict};
pub use strength::{parent_contributions, ParentContribution};

use crate::error::Error;
use crate::network::{Network, NodeId};
use crate::sign::Sign;

/// Largest network the enumerator accepts.
pub const MAX_NODES: usize = 12;

/// Below this a posterior shift counts as no shift.
pub const EPSILON: f64 = 1e-9;

const TOLERANCE: f64 = 1e-12;
const SYNERGY_ATTEMPTS: usize = 2000;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("network has {nodes} nodes; exact enumeration handles at most {MAX_NODES}")]
    TooLarge { nodes: usize },

    #[error("no consistent table found for {constraint}")]
    Infeasible { constraint: String },

    #[error("evidence has probability 0")]
    ImpossibleEvidence,

    #[error("table for `{node}` must have {expected} entries in [0, 1]")]
    BadTable { node: String, expected: usize },

    #[error(transparent)]
    Model(#[from] Error),
}

pub(crate) fn within_budget(net: &Network) -> Result<(), OracleError> {
    if net.len() > MAX_NODES {
        return Err(OracleError::TooLarge { nodes: net.len() });
    }
    Ok(())
}

/// `P(node = true | parents)`, indexed by parent context: bit `j` set when
/// the `j`-th parent (in [`Network::parents`] order) is true.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantification {
    tables: Vec<Vec<f64>>,
}

impl Quantification {
    /// Tables indexed by node, each of length `2^in_degree`.
    pub fn from_tables(net: &Network, tables: Vec<Vec<f64>>) -> Result<Quantification, OracleError> {
        let ok = tables.len() == net.len()
            && net.nodes().zip(&tables).all(|(v, t)| {
                t.len() == 1 << net.in_degree(v) && t.iter().all(|p| (0.0..=1.0).contains(p))
            });
        if !ok {
            let bad = net
                .nodes()
                .find(|&v| tables.get(v.index()).is_none_or(|t| t.len() != 1 << net.in_degree(v)))
                .unwrap_or(NodeId(0));
            return Err(OracleError::BadTable {
                node: net.label(bad).to_string(),
                expected: 1 << net.in_degree(bad),
            });
        }
        Ok(Quantification { tables })
    }

    pub fn table(&self, v: NodeId) -> &[f64] {
        &self.tables[v.index()]
    }

    /// Probability that `v` is true given a full assignment.
    pub fn p_true(&self, net: &Network, v: NodeId, assignment: &[bool]) -> f64 {
        let ctx = net
            .parents(v)
            .iter()
            .enumerate()
            .fold(0, |ctx, (j, &(p, _))| ctx | (usize::from(assignment[p.index()]) << j));
        self.tables[v.index()][ctx]
    }

    /// Every sign and synergy constraint of `net` this quantification breaks.
    pub fn violations(&self, net: &Network) -> Vec<String> {
        let mut out = Vec::new();
        for v in net.nodes() {
            let table = self.table(v);
            for (j, &(p, sign)) in net.parents(v).iter().enumerate() {
                let bit = 1 << j;
                for ctx in (0..table.len()).filter(|c| c & bit == 0) {
                    let d = table[ctx | bit] - table[ctx];
                    if !sign_holds(sign, d) {
                        out.push(format!("{}->{} ({sign}) in context {ctx:b}", net.label(p), net.label(v)));
                        break;
                    }
                }
            }
        }
        for s in net.synergies() {
            if let Some(ctx) = synergy_violation(net, self.table(s.child), s) {
                out.push(format!(
                    "synergy ({},{}) on {}={} ({}) in context {ctx:b}",
                    net.label(s.pair.0),
                    net.label(s.pair.1),
                    net.label(s.child),
                    s.value,
                    s.sign
                ));
            }
        }
        out
    }
}

fn sign_holds(sign: Sign, d: f64) -> bool {
    match sign {
        Sign::Plus => d >= -TOLERANCE,
        Sign::Minus => d <= TOLERANCE,
        Sign::Zero => d.abs() <= TOLERANCE,
        Sign::Ambiguous => true,
    }
}

/// First context of the other parents in which the product synergy fails.
fn synergy_violation(net: &Network, table: &[f64], s: &crate::network::ProductSynergy) -> Option<usize> {
    let parents = net.parents(s.child);
    let bit = |x: NodeId| 1 << parents.iter().position(|&(p, _)| p == x).expect("synergy pair are parents");
    let (a, b) = (bit(s.pair.0), bit(s.pair.1));
    let q = |ctx: usize| if s.value { table[ctx] } else { 1.0 - table[ctx] };
    (0..table.len()).filter(|c| c & (a | b) == 0).find(|&ctx| {
        let d = q(ctx | a | b) * q(ctx) - q(ctx | a) * q(ctx | b);
        !sign_holds(s.sign, d)
    })
}

/// Random tables consistent with every arc sign and synergy of `net`,
/// deterministic per seed.
pub fn quantify(net: &Network, seed: u64) -> Result<Quantification, OracleError> {
    within_budget(net)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tables = Vec::with_capacity(net.len());
    for v in net.nodes() {
        let synergies: Vec<_> = net.synergies().iter().filter(|s| s.child == v).collect();
        let zero = synergies.iter().find(|s| s.sign == Sign::Zero);
        let mut attempt = 0;
        let table = loop {
            let table = match zero {
                Some(z) => log_additive(net, v, z.value, &mut rng),
                None => monotone(net, v, &mut rng),
            };
            match synergies.iter().find(|s| synergy_violation(net, &table, s).is_some()) {
                None => break table,
                Some(s) if attempt + 1 >= SYNERGY_ATTEMPTS => {
                    return Err(OracleError::Infeasible {
                        constraint: format!(
                            "synergy ({},{}) on {}={} ({})",
                            net.label(s.pair.0),
                            net.label(s.pair.1),
                            net.label(v),
                            s.value,
                            s.sign
                        ),
                    })
                }
                Some(_) => attempt += 1,
            }
        };
        tables.push(table);
    }
    Ok(Quantification { tables })
}

/// Sorted random values placed along a random linear extension of the
/// parent contexts, ordered so that flipping a `+` parent to true (a `-`
/// parent to false) never lowers the value. `0` parents are ignored.
fn monotone(net: &Network, v: NodeId, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let parents = net.parents(v);
    let k = parents.len();
    let active: Vec<usize> = (0..k).filter(|&j| parents[j].1 != Sign::Zero).collect();
    let m = active.len();
    // contexts over the active parents; `up[c]` lists the successors of c
    let oriented = |c: usize, i: usize| {
        let on = c >> i & 1 == 1;
        if parents[active[i]].1 == Sign::Minus { !on } else { on }
    };
    let mut indegree = vec![0usize; 1 << m];
    let mut up: Vec<Vec<usize>> = vec![Vec::new(); 1 << m];
    for c in 0..1usize << m {
        for i in 0..m {
            if parents[active[i]].1.is_strict() && !oriented(c, i) {
                up[c].push(c ^ 1 << i);
                indegree[c ^ 1 << i] += 1;
            }
        }
    }
    let mut values: Vec<f64> = (0..1usize << m).map(|_| rng.gen_range(0.02..0.98)).collect();
    values.sort_by(f64::total_cmp);
    let mut ready: Vec<usize> = (0..1usize << m).filter(|&c| indegree[c] == 0).collect();
    let mut local = vec![0.0; 1 << m];
    for &value in &values {
        let pick = rng.gen_range(0..ready.len());
        let c = ready.swap_remove(pick);
        local[c] = value;
        for &n in &up[c] {
            indegree[n] -= 1;
            if indegree[n] == 0 {
                ready.push(n);
            }
        }
    }
    (0..1usize << k)
        .map(|ctx| {
            let c = active.iter().enumerate().fold(0, |c, (i, &j)| c | (ctx >> j & 1) << i);
            local[c]
        })
        .collect()
}

/// `log P(child = value | ctx)` additive over parents, so every product
/// synergy for `value` is exactly zero.
fn log_additive(net: &Network, v: NodeId, value: bool, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let parents = net.parents(v);
    // effect of each parent being true on log P(child = value)
    let effects: Vec<f64> = parents
        .iter()
        .map(|&(_, sign)| {
            let magnitude = rng.gen_range(0.05..1.5);
            let towards_true = match sign {
                Sign::Plus => magnitude,
                Sign::Minus => -magnitude,
                Sign::Zero => 0.0,
                Sign::Ambiguous => *[magnitude, -magnitude].choose(rng).unwrap(),
            };
            if value { towards_true } else { -towards_true }
        })
        .collect();
    let logs: Vec<f64> = (0..1usize << parents.len())
        .map(|ctx| effects.iter().enumerate().filter(|&(j, _)| ctx >> j & 1 == 1).map(|(_, e)| e).sum())
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ceiling = rng.gen_range(0.3f64..0.98).ln();
    logs.iter()
        .map(|l| {
            let q = (l - top + ceiling).exp();
            if value { q } else { 1.0 - q }
        })
        .collect()
}
