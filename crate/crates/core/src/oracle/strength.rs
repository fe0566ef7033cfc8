//! Realized strength of each parent's influence on a child.
//!
//! The child's probability is treated as a function of its parents'
//! marginals, `F(p) = Σ_ctx P(child | ctx) Π_j p_j^[ctx_j] (1 - p_j)^[!ctx_j]`,
//! and the change of `F` from the before- to the after-marginals is split
//! among the parents by Shapley value. The split is exact for `F`; it
//! differs from the child's true shift only by how the evidence changes the
//! parents' dependence on each other.

use serde::Serialize;

use super::{posteriors, OracleError, Quantification};
use crate::network::Network;
use crate::query::Query;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParentContribution {
    pub parent: String,
    pub before: f64,
    pub after: f64,
    /// Shapley share of the child's shift attributed to this parent.
    pub share: f64,
}

fn value(table: &[f64], marginals: &[f64]) -> f64 {
    table
        .iter()
        .enumerate()
        .map(|(ctx, f)| {
            f * marginals
                .iter()
                .enumerate()
                .map(|(j, &p)| if ctx >> j & 1 == 1 { p } else { 1.0 - p })
                .product::<f64>()
        })
        .sum()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Per-parent shares of `child`'s shift under `query`, in parent order.
pub fn parent_contributions(
    net: &Network,
    quant: &Quantification,
    query: &Query,
    child: &str,
) -> Result<Vec<ParentContribution>, OracleError> {
    let q = query.bind_strict(net)?;
    let c = net.require(child)?;
    let before = posteriors(net, quant, &q.observed)?;
    let after = posteriors(net, quant, &q.all_observed())?;
    let parents = net.parents(c);
    let k = parents.len();
    let lo: Vec<f64> = parents.iter().map(|&(p, _)| before[p.index()]).collect();
    let hi: Vec<f64> = parents.iter().map(|&(p, _)| after[p.index()]).collect();
    let table = quant.table(c);
    let at = |switched: usize| -> f64 {
        let m: Vec<f64> = (0..k).map(|j| if switched >> j & 1 == 1 { hi[j] } else { lo[j] }).collect();
        value(table, &m)
    };
    let out = parents
        .iter()
        .enumerate()
        .map(|(j, &(p, _))| {
            let share = (0..1usize << k)
                .filter(|s| s >> j & 1 == 0)
                .map(|s| {
                    let size = s.count_ones() as usize;
                    let weight = factorial(size) * factorial(k - size - 1) / factorial(k);
                    weight * (at(s | 1 << j) - at(s))
                })
                .sum();
            ParentContribution { parent: net.label(p).to_string(), before: lo[j], after: hi[j], share }
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::oracle::{posterior_deltas, quantify};

    #[test]
    fn shares_sum_to_the_independent_shift_and_follow_arc_signs() {
        let net = fixtures::trade_off();
        let query = fixtures::trade_off_query();
        for seed in 0..20 {
            let quant = quantify(&net, seed).unwrap();
            let shares = parent_contributions(&net, &quant, &query, "C").unwrap();
            let names: Vec<_> = shares.iter().map(|s| s.parent.as_str()).collect();
            assert_eq!(names, ["D", "G"]);
            let c = net.require("C").unwrap();
            let lo: Vec<f64> = shares.iter().map(|s| s.before).collect();
            let hi: Vec<f64> = shares.iter().map(|s| s.after).collect();
            let total = value(quant.table(c), &hi) - value(quant.table(c), &lo);
            let sum: f64 = shares.iter().map(|s| s.share).sum();
            assert!((total - sum).abs() < 1e-12);
            // D raises C, G lowers it
            assert!(shares[0].share * (shares[0].after - shares[0].before) >= -1e-15);
            assert!(shares[1].share * (shares[1].after - shares[1].before) <= 1e-15);
            let _ = posterior_deltas(&net, &quant, &query).unwrap();
        }
    }

    #[test]
    fn single_parent_share_is_the_whole_shift() {
        let net = Network::builder().nodes(["A", "B"]).arc("A", "B", crate::sign::Sign::Plus).build().unwrap();
        let quant = Quantification::from_tables(&net, vec![vec![0.4], vec![0.2, 0.7]]).unwrap();
        let q = Query::new([], ("A", true), "B");
        let shares = parent_contributions(&net, &quant, &q, "B").unwrap();
        let delta = posterior_deltas(&net, &quant, &q).unwrap()[1].delta();
        assert!((shares[0].share - delta).abs() < 1e-12);
    }
}
