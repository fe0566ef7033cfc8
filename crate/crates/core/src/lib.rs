//! Qualitative probabilistic networks: sign propagation, relevance, and
//! pivotal pruning to explain trade-offs, with a numeric oracle.

mod chains;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod fixtures;
pub mod network;
pub mod oracle;
pub mod pivotal;
pub mod propagation;
pub mod query;
pub mod relevance;
pub mod separation;
pub mod sign;

pub use error::{Error, Result};
pub use network::{Network, NodeId};
pub use query::Query;
pub use sign::Sign;
