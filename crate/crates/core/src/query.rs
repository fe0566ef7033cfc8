use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{Network, NodeId};

/// A new observation `evidence` entered on top of the earlier `observed`
/// ones, asking about its effect on `interest`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Query {
    pub observed: BTreeMap<String, bool>,
    pub evidence: (String, bool),
    pub interest: String,
}

impl Query {
    pub fn new<'a>(
        observed: impl IntoIterator<Item = (&'a str, bool)>,
        evidence: (&str, bool),
        interest: &str,
    ) -> Query {
        Query {
            observed: observed.into_iter().map(|(n, v)| (n.to_string(), v)).collect(),
            evidence: (evidence.0.to_string(), evidence.1),
            interest: interest.to_string(),
        }
    }

    /// Same observations, different node of interest.
    pub fn with_interest(&self, interest: &str) -> Query {
        Query { interest: interest.to_string(), ..self.clone() }
    }

    pub fn check(&self) -> Result<()> {
        let (e, _) = &self.evidence;
        if self.observed.contains_key(e) {
            return Err(Error::InvalidQuery(format!("evidence node `{e}` is already observed")));
        }
        if self.observed.contains_key(&self.interest) {
            return Err(Error::InvalidQuery(format!(
                "interest node `{}` is observed",
                self.interest
            )));
        }
        if &self.interest == e {
            return Err(Error::InvalidQuery(format!("interest node `{e}` is the evidence node")));
        }
        Ok(())
    }

    /// The same query without observations of nodes absent from `net`, as
    /// needed on a sub-network such as the relevant network.
    pub fn restricted_to(&self, net: &Network) -> Query {
        let mut q = self.clone();
        q.observed.retain(|l, _| net.id(l).is_some());
        q
    }

    /// Bind to a network. Evidence and interest must exist; earlier
    /// observations of nodes absent from `net` are dropped, which is what
    /// sub-networks of the original need.
    pub(crate) fn bind(&self, net: &Network) -> Result<BoundQuery> {
        self.check()?;
        let evidence = net.require(&self.evidence.0)?;
        let interest = net.require(&self.interest)?;
        let observed = self
            .observed
            .iter()
            .filter_map(|(l, &v)| net.id(l).map(|id| (id, v)))
            .collect();
        Ok(BoundQuery { observed, evidence, evidence_value: self.evidence.1, interest })
    }

    /// Like `bind`, but every observed node must exist in `net`.
    pub(crate) fn bind_strict(&self, net: &Network) -> Result<BoundQuery> {
        for l in self.observed.keys() {
            net.require(l)?;
        }
        self.bind(net)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct BoundQuery {
    pub observed: BTreeMap<NodeId, bool>,
    pub evidence: NodeId,
    pub evidence_value: bool,
    pub interest: NodeId,
}

impl BoundQuery {
    /// `O` together with the new evidence.
    pub fn all_observed(&self) -> BTreeMap<NodeId, bool> {
        let mut all = self.observed.clone();
        all.insert(self.evidence, self.evidence_value);
        all
    }

    pub fn observed_set(&self) -> BTreeSet<NodeId> {
        self.observed.keys().copied().collect()
    }
}
