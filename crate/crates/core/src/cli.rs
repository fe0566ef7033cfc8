//! Command-line front end. Exit status: 0 success, 1 a domain outcome
//! (nothing to explain, no chain, counterexamples), 2 usage or input errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::Error;
use crate::network::Network;
use crate::oracle::{check_against, OracleError};
use crate::pivotal::{pivotal_pruning, PivotError};
use crate::propagation::propagate;
use crate::query::Query;
use crate::relevance::relevant_network;

#[derive(Debug, Parser)]
#[command(name = "qpn", version, about = "Sign propagation and trade-off explanation for qualitative probabilistic networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Propagate the evidence and print every node's sign.
    Propagate {
        #[command(flatten)]
        common: Common,
        /// Append the message log.
        #[arg(long)]
        trace: bool,
    },
    /// Explain an ambiguous interest sign.
    Explain {
        #[command(flatten)]
        common: Common,
        /// Levels of nested explanations for ambiguous frontier members.
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Print the relevant network as a network file.
    Relevant {
        #[command(flatten)]
        common: Common,
    },
    /// Compare propagated signs with exact posteriors under random tables.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draw tables from this network instead (same nodes, possibly other signs).
        #[arg(long, value_name = "FILE")]
        truth: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Network file (JSON).
    network: PathBuf,
    /// Earlier observation, repeatable.
    #[arg(long = "observe", value_name = "NODE=BOOL", value_parser = assignment)]
    observed: Vec<(String, bool)>,
    #[arg(long, value_name = "NODE=BOOL", value_parser = assignment)]
    evidence: (String, bool),
    #[arg(long, value_name = "NODE")]
    interest: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

fn assignment(s: &str) -> Result<(String, bool), String> {
    let (node, value) = s.split_once('=').ok_or_else(|| format!("expected NODE=true|false, got `{s}`"))?;
    let value = value.parse().map_err(|_| format!("expected true or false after `=`, got `{value}`"))?;
    if node.is_empty() {
        return Err("empty node name".into());
    }
    Ok((node.to_string(), value))
}

/// A failure with its exit status.
struct Exit(i32, String);

impl From<Error> for Exit {
    fn from(e: Error) -> Exit {
        match e {
            Error::Disconnected { .. } => Exit(1, e.to_string()),
            _ => Exit(2, e.to_string()),
        }
    }
}

impl From<OracleError> for Exit {
    fn from(e: OracleError) -> Exit {
        match e {
            OracleError::Model(e) => e.into(),
            e => Exit(2, e.to_string()),
        }
    }
}

impl Common {
    fn load(&self) -> Result<(Network, Query), Exit> {
        let net = load(&self.network)?;
        let mut observed = BTreeMap::new();
        for (node, value) in &self.observed {
            if observed.insert(node.clone(), *value).is_some_and(|old| old != *value) {
                return Err(Exit(2, format!("`{node}` observed both true and false")));
            }
        }
        let query = Query { observed, evidence: self.evidence.clone(), interest: self.interest.clone() };
        query.check()?;
        Ok((net, query))
    }
}

fn load(path: &PathBuf) -> Result<Network, Exit> {
    Network::load(path).map_err(|e| Exit(2, format!("{}: {e}", path.display())))
}

fn pretty(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("output serializes") + "\n"
}

fn execute(command: Command) -> Result<(i32, String), Exit> {
    match command {
        Command::Propagate { common, trace } => {
            let (net, query) = common.load()?;
            let (signs, log) = propagate(&net, &query)?;
            let out = match common.format {
                Format::Text => {
                    let mut out = String::new();
                    for (v, s) in signs.iter() {
                        let _ = writeln!(out, "{} {s}", net.label(v));
                    }
                    if trace {
                        out.push_str("trace:\n");
                        out.push_str(&log.render(&net));
                    }
                    out
                }
                Format::Structured => {
                    let mut doc = json!({ "signs": signs.named(&net) });
                    if trace {
                        let messages: Vec<_> = log
                            .messages
                            .iter()
                            .map(|m| json!({ "from": net.label(m.from), "to": net.label(m.to), "sign": m.sign }))
                            .collect();
                        doc["trace"] = json!(messages);
                    }
                    pretty(&doc)
                }
            };
            Ok((0, out))
        }
        Command::Explain { common, depth } => {
            let (net, query) = common.load()?;
            match pivotal_pruning(&net, &query, depth) {
                Ok(ex) => Ok((0, match common.format {
                    Format::Text => ex.render(),
                    Format::Structured => pretty(&ex),
                })),
                Err(PivotError::NoAmbiguity { interest, sign }) => Ok((1, match common.format {
                    Format::Text => format!("no ambiguity: sign[{interest}] = {sign}\n"),
                    Format::Structured => pretty(&json!({ "outcome": "no-ambiguity", "interest": interest, "sign": sign })),
                })),
                Err(PivotError::Model(e)) => Err(e.into()),
                Err(e @ PivotError::AmbiguousInfluence { .. }) => Err(Exit(2, e.to_string())),
                Err(e @ PivotError::Internal(_)) => Err(Exit(2, e.to_string())),
            }
        }
        Command::Relevant { common } => {
            let (net, query) = common.load()?;
            // the network file format is already machine-readable
            Ok((0, relevant_network(&net, &query)?.to_json() + "\n"))
        }
        Command::Check { common, trials, seed, truth } => {
            let (net, query) = common.load()?;
            let truth = match &truth {
                Some(path) => load(path)?,
                None => net.clone(),
            };
            let report = check_against(&net, &truth, &query, trials, seed)?;
            let status = i32::from(report.counterexamples > 0);
            Ok((status, match common.format {
                Format::Text => report.render(),
                Format::Structured => pretty(&report),
            }))
        }
    }
}

/// Run with `args` (program name first), writing to `out` and `err`.
/// Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return status;
        }
    };
    match execute(cli.command) {
        Ok((status, text)) => {
            let _ = out.write_all(text.as_bytes());
            status
        }
        Err(Exit(status, message)) => {
            let _ = writeln!(err, "error: {message}");
            status
        }
    }
}
