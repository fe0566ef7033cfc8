//! One PASS/FAIL line per acceptance criterion, written straight to stderr
//! so it shows without `--nocapture`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use qpn::corpus::{self, CorpusSpec};
use qpn::oracle::{check_soundness, parent_contributions, posterior_deltas, quantify};
use qpn::pivotal::{articulation_nodes, compute_pivot, pivotal_pruning, BranchOutcome};
use qpn::propagation::propagate;
use qpn::relevance::{classify, relevant_network};
use qpn::{fixtures, Error, Network, Query, Sign};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn sign_at(net: &Network, query: &Query, node: &str) -> Sign {
    let (signs, _) = propagate(net, query).unwrap();
    signs.sign_of(net, node).unwrap()
}

fn operators() -> Outcome {
    let (prod, sum) = (common::table_product(), common::table_sum());
    let mut wrong = Vec::new();
    for (r, &a) in common::ORDER.iter().enumerate() {
        for (c, &b) in common::ORDER.iter().enumerate() {
            if (a * b).to_string() != prod[r][c] {
                wrong.push(format!("{a}(x){b}"));
            }
            if (a + b).to_string() != sum[r][c] {
                wrong.push(format!("{a}(+){b}"));
            }
        }
    }
    outcome(wrong.is_empty(), format!("32 cells, wrong: {wrong:?}"))
}

fn worked_example() -> Outcome {
    let net = fixtures::trade_off();
    let query = fixtures::trade_off_query();
    let mut failures = Vec::new();
    let mut expect = |what: &str, ok: bool| {
        if !ok {
            failures.push(what.to_string());
        }
    };
    expect("sign[A] = ?", sign_at(&net, &query, "A") == Sign::Ambiguous);
    let ex = pivotal_pruning(&net, &query, 0).unwrap();
    expect("pivot C", ex.pivot == "C");
    expect("frontier {G, I}", ex.frontier == ["G", "I"]);
    let chains = |r: &str| ex.chain_signs.iter().filter(|c| c.resolver == r).map(|c| c.sign).collect::<Vec<_>>();
    expect("I chain +", chains("I") == [Sign::Plus]);
    expect("G chain -", chains("G") == [Sign::Minus]);
    expect("pivot to interest -", ex.pivot_to_interest == Sign::Minus);
    let both_plus = ex.branches.iter().find(|b| b.assignment.get("I") == Some(&Sign::Plus) && b.assignment.get("G") == Some(&Sign::Plus));
    expect(
        "(I=+, G=+) conditional",
        matches!(both_plus.map(|b| &b.outcome), Some(BranchOutcome::Conditional { positive, negative })
            if positive.iter().all(|t| t.resolver == "I") && negative.iter().all(|t| t.resolver == "G")),
    );
    outcome(failures.is_empty(), format!("failed: {failures:?}"))
}

fn full_example() -> Outcome {
    let net = fixtures::full_example();
    let arts = articulation_nodes(&net);
    let classes = classify(&net, &fixtures::trade_off_query()).unwrap();
    let c = |n: &str| {
        let k = classes[n];
        (k.structural, k.computational, k.dynamic)
    };
    let expected = [
        ("D", (true, true, true)),
        ("E", (true, false, false)),
        ("J", (true, true, false)),
        ("M", (false, false, false)),
    ];
    let bad: Vec<_> = expected.iter().filter(|(n, k)| c(n) != *k).map(|(n, _)| *n).collect();
    outcome(arts.contains("C") && bad.is_empty(), format!("articulation {arts:?}, misclassified {bad:?}"))
}

/// Random relevant networks whose interest sign is ambiguous.
fn ambiguous_relevant(seed: u64, want: usize) -> Vec<(Network, Query)> {
    let mut found = Vec::new();
    for (net, query) in corpus::sample(seed, want * 40, &CorpusSpec::default()) {
        let Ok(rel) = relevant_network(&net, &query) else { continue };
        let query = query.restricted_to(&rel);
        if sign_at(&rel, &query, &query.interest) == Sign::Ambiguous {
            found.push((rel, query));
            if found.len() == want {
                break;
            }
        }
    }
    found
}

fn pivot_properties() -> Outcome {
    let cases = ambiguous_relevant(4, 1000);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = Vec::new();
    for (k, (rel, query)) in cases.iter().enumerate() {
        let pivot = match compute_pivot(rel, query) {
            Ok(p) => p,
            Err(e) => {
                violations.push(format!("case {k}: {e}"));
                continue;
            }
        };
        let mut allowed = articulation_nodes(rel);
        allowed.insert(query.interest.clone());
        if !allowed.contains(&pivot) {
            violations.push(format!("case {k}: pivot {pivot} not an articulation node"));
        }
        for _ in 0..3 {
            let mut names: Vec<String> = (0..rel.len()).map(|i| format!("R{i:02}")).collect();
            names.shuffle(&mut rng);
            let map: BTreeMap<String, String> = rel.labels().iter().cloned().zip(names).collect();
            let (renamed, rq) = common::relabel(rel, query, &map);
            match compute_pivot(&renamed, &rq) {
                Ok(p) if p == map[&pivot] => {}
                other => violations.push(format!("case {k}: permuted pivot {other:?} vs {pivot}")),
            }
        }
    }
    outcome(
        cases.len() >= 1000 && violations.is_empty(),
        format!("{} networks, violations {}: {:?}", cases.len(), violations.len(), violations.iter().take(3).collect::<Vec<_>>()),
    )
}

fn relevant_equivalence() -> Outcome {
    let mut violations = Vec::new();
    let mut checked = (0, 0);
    for (net, query) in corpus::sample(5, 1000, &CorpusSpec::default()) {
        let full = sign_at(&net, &query, &query.interest);
        match relevant_network(&net, &query) {
            Ok(rel) => {
                let r = sign_at(&rel, &query.restricted_to(&rel), &query.interest);
                if r != full {
                    violations.push(format!("sign {full} vs {r}"));
                }
            }
            Err(Error::Disconnected { .. }) if full == Sign::Zero => {}
            Err(e) => violations.push(format!("{e} with sign {full}")),
        }
        checked.0 += 1;
    }
    let small = CorpusSpec { nodes: 4..=8, ..CorpusSpec::default() };
    for (net, query) in corpus::sample(6, 1000, &small) {
        let brute = common::brute_force_relevant(&net, &query);
        let ours: BTreeSet<String> = match relevant_network(&net, &query) {
            Ok(rel) => rel.labels().iter().cloned().collect(),
            Err(Error::Disconnected { .. }) => BTreeSet::new(),
            Err(e) => panic!("{e}"),
        };
        if brute != ours {
            violations.push(format!("set {ours:?} vs brute force {brute:?}"));
        }
        checked.1 += 1;
    }
    outcome(
        violations.is_empty(),
        format!("{} sign pairs, {} set pairs, violations {}: {:?}", checked.0, checked.1, violations.len(), violations.iter().take(3).collect::<Vec<_>>()),
    )
}

fn termination() -> Outcome {
    let mut worst = 0;
    let mut runs = 0;
    let spec = CorpusSpec::default();
    for seed in [4, 5] {
        for (net, query) in corpus::sample(seed, 2000, &spec) {
            let (_, trace) = propagate(&net, &query).unwrap();
            worst = worst.max(trace.max_sign_changes());
            runs += 1;
        }
    }
    outcome(worst <= 2, format!("{runs} propagations, most sign changes at one node: {worst}"))
}

fn soundness() -> Outcome {
    let spec = CorpusSpec { nodes: 4..=8, ..CorpusSpec::default() };
    let (mut trials, mut skipped, mut bad) = (0, 0, Vec::new());
    let pairs = corpus::sample(7, 60, &spec);
    for (k, (net, query)) in pairs.iter().enumerate() {
        let report = check_soundness(net, query, 10, 1000 * k as u64).unwrap();
        trials += report.trials - report.skipped.len();
        skipped += report.skipped.len();
        if report.counterexamples > 0 {
            bad.push(format!("network {k}: {} counterexamples", report.counterexamples));
        }
    }
    outcome(
        trials >= 500 && bad.is_empty(),
        format!("{} networks, {trials} trials ({skipped} skipped), {bad:?}", pairs.len()),
    )
}

fn trade_off_witness() -> Outcome {
    let net = fixtures::trade_off();
    let query = fixtures::trade_off_query();
    let ex = pivotal_pruning(&net, &query, 0).unwrap();
    // the pivot's parent through which each chain term arrives
    let entry: BTreeMap<(String, usize), String> = ex
        .chain_signs
        .iter()
        .map(|c| ((c.resolver.clone(), c.chain_index), c.nodes[c.nodes.len() - 2].clone()))
        .collect();
    let (mut up, mut down, mut mismatches, mut conditional) = (0, 0, Vec::new(), 0);
    for seed in 0..200 {
        let quant = quantify(&net, seed).unwrap();
        let deltas = posterior_deltas(&net, &quant, &query).unwrap();
        let dir = |n: &str| deltas.iter().find(|d| d.node == n).unwrap().direction;
        match dir("A") {
            Sign::Plus => up += 1,
            Sign::Minus => down += 1,
            _ => {}
        }
        let shares: BTreeMap<String, f64> = parent_contributions(&net, &quant, &query, &ex.pivot)
            .unwrap()
            .into_iter()
            .map(|c| (c.parent, c.share))
            .collect();
        // realized resolver signs pick the branch; a resolver that did not
        // move contributes nothing
        let mut positive = 0.0f64;
        let mut negative = 0.0f64;
        for c in &ex.chain_signs {
            let strength = shares[&entry[&(c.resolver.clone(), c.chain_index)]].abs();
            match dir(&c.resolver) * c.sign {
                Sign::Plus => positive += strength,
                Sign::Minus => negative += strength,
                _ => {}
            }
        }
        let predicted = match (positive > 0.0, negative > 0.0) {
            (true, true) => {
                conditional += 1;
                if positive >= negative { Sign::Plus } else { Sign::Minus }
            }
            (true, false) => Sign::Plus,
            (false, true) => Sign::Minus,
            (false, false) => Sign::Zero,
        };
        if predicted != dir(&ex.pivot) {
            mismatches.push(seed);
        }
    }
    outcome(
        up > 0 && down > 0 && mismatches.is_empty(),
        format!(
            "200 trials, A up {up} / down {down}; {conditional} conditional branches; branch vs sign at C mismatches {}: seeds {mismatches:?}",
            mismatches.len()
        ),
    )
}

fn cli_round_trip() -> Outcome {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/full_example.json");
    let run = |args: &[&str]| {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let status = qpn::cli::run(std::iter::once("qpn").chain(args.iter().copied()), &mut out, &mut err);
        (status, String::from_utf8(out).unwrap())
    };
    let common = ["--evidence", "H=true", "--interest", "A"];
    let relevant: Vec<&str> = ["relevant", path].iter().chain(&common).copied().collect();
    let (status, text) = run(&relevant);
    let expected = relevant_network(&fixtures::full_example(), &fixtures::trade_off_query()).unwrap();
    let round_trip = status == 0 && Network::from_json(&text).is_ok_and(|n| n == expected);
    let mut identical = true;
    for cmd in [
        vec!["propagate", path, "--trace"],
        vec!["explain", path, "--depth", "2"],
        vec!["explain", path, "--format", "structured"],
        vec!["check", path, "--trials", "20", "--seed", "7"],
        vec!["relevant", path],
    ] {
        let args: Vec<&str> = cmd.iter().chain(&common).copied().collect();
        identical &= run(&args) == run(&args);
    }
    outcome(round_trip && identical, format!("round trip {round_trip}, byte-identical reruns {identical}"))
}

type Criterion = (u32, &'static str, fn() -> Outcome, Duration);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 9] = [
        (1, "sign operators match the tables", operators, Duration::from_secs(1)),
        (2, "worked example reproduced", worked_example, Duration::from_secs(1)),
        (3, "full example articulation and classes", full_example, Duration::from_secs(1)),
        (4, "pivot unique and an articulation node", pivot_properties, Duration::from_secs(60)),
        (5, "relevant network equivalence", relevant_equivalence, Duration::from_secs(60)),
        (6, "at most two sign changes per node", termination, Duration::from_secs(60)),
        (7, "oracle soundness", soundness, Duration::from_secs(300)),
        (8, "trade-off witness and branch consistency", trade_off_witness, Duration::from_secs(120)),
        (9, "cli determinism and round trip", cli_round_trip, Duration::from_secs(5)),
    ];
    let mut failed = Vec::new();
    for (n, name, check, limit) in criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| outcome(false, format!("panicked: {:?}", e.downcast_ref::<String>().map(String::as_str).or(e.downcast_ref::<&str>().copied()))));
        let elapsed = start.elapsed();
        let pass = result.pass && elapsed <= limit;
        let line = format!(
            "criterion {n} {}: {name} ({:.2}s, limit {}s) {}\n",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs(),
            result.detail
        );
        let _ = std::io::stderr().write_all(line.as_bytes());
        if !pass {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
