use crate::network::Violation;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("invalid network: {}", format_violations(.0))]
    InvalidNetwork(Vec<Violation>),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("not a trail: {0}")]
    NotATrail(String),

    #[error("`{evidence}` is d-separated from `{interest}`: the relevant network is empty")]
    Disconnected { evidence: String, interest: String },

    #[error("failed to parse network: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
