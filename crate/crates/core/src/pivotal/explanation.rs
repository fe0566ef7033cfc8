use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::sign::Sign;

/// Sign of one reasoning chain from a frontier member to the pivot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolverChainSign {
    pub resolver: String,
    /// 1-based, per resolver.
    pub chain_index: usize,
    /// Rendered chain, e.g. `I->D->C`.
    pub chain: String,
    pub nodes: Vec<String>,
    pub sign: Sign,
}

/// `sign[resolver] (x) chain sign` for one branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Term {
    pub resolver: String,
    pub chain_index: usize,
    pub chain: String,
    pub sign: Sign,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{} via {}", self.resolver, self.sign, self.chain)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BranchOutcome {
    /// All contributing terms agree.
    Determined { sign: Sign },
    /// `if |(+) positive| >= |(+) negative| then + else -`.
    Conditional { positive: Vec<Term>, negative: Vec<Term> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Branch {
    /// Sign assumed for each frontier member.
    pub assignment: BTreeMap<String, Sign>,
    pub outcome: BranchOutcome,
}

impl Branch {
    /// Pivot sign under this branch given which side is stronger.
    pub fn resolve(&self, positive_at_least_as_strong: bool) -> Sign {
        match &self.outcome {
            BranchOutcome::Determined { sign } => *sign,
            BranchOutcome::Conditional { .. } if positive_at_least_as_strong => Sign::Plus,
            BranchOutcome::Conditional { .. } => Sign::Minus,
        }
    }
}

/// Conditional account of an ambiguous interest sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Explanation {
    pub interest: String,
    pub evidence: (String, bool),
    pub pivot: String,
    /// Articulation nodes between evidence and interest, nearest the evidence first, ending with the interest.
    pub candidates: Vec<String>,
    pub boundary: Option<String>,
    pub frontier: Vec<String>,
    pub chain_signs: Vec<ResolverChainSign>,
    pub branches: Vec<Branch>,
    /// `sign[interest] = sign[pivot] (x) pivot_to_interest`.
    pub pivot_to_interest: Sign,
    pub notes: Vec<String>,
    /// Explanations for ambiguous frontier members.
    pub children: Vec<Explanation>,
}

impl Explanation {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        let list = |items: &[String]| format!("{{{}}}", items.join(", "));
        let (e, v) = &self.evidence;
        let _ = writeln!(out, "{pad}explanation for {} given {e}={v}", self.interest);
        let _ = writeln!(out, "{pad}  pivot: {}", self.pivot);
        let _ = writeln!(out, "{pad}  candidates: {}", self.candidates.join(" < "));
        let _ = writeln!(out, "{pad}  boundary: {}", self.boundary.as_deref().unwrap_or("none"));
        let _ = writeln!(out, "{pad}  frontier: {}", list(&self.frontier));
        let _ = writeln!(out, "{pad}  chains:");
        for c in &self.chain_signs {
            let _ = writeln!(out, "{pad}    {} #{}: {} = {}", c.resolver, c.chain_index, c.chain, c.sign);
        }
        let _ = writeln!(out, "{pad}  branches:");
        for b in &self.branches {
            let assignment: Vec<String> = b.assignment.iter().map(|(k, s)| format!("{k}={s}")).collect();
            let _ = write!(out, "{pad}    [{}] ", assignment.join(", "));
            let p = &self.pivot;
            match &b.outcome {
                BranchOutcome::Determined { sign } => {
                    let _ = writeln!(out, "sign[{p}]={sign}");
                }
                BranchOutcome::Conditional { positive, negative } => {
                    let join = |terms: &[Term]| {
                        terms.iter().map(Term::to_string).collect::<Vec<_>>().join(" (+) ")
                    };
                    let _ = writeln!(
                        out,
                        "if |{}| >= |{}| then sign[{p}]=+ else sign[{p}]=-",
                        join(positive),
                        join(negative)
                    );
                }
            }
        }
        let _ = writeln!(out, "{pad}  sign[{}] = sign[{}] (x) {}", self.interest, self.pivot, self.pivot_to_interest);
        for note in &self.notes {
            let _ = writeln!(out, "{pad}  note: {note}");
        }
        for child in &self.children {
            child.render_into(out, depth + 1);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("explanation serializes")
    }
}
