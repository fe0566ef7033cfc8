//! Canonical example networks.
//!
//! `trade_off` is the nine-node network whose ambiguous result for `A`
//! (after observing `H = true`) stems from two conflicting influences on `I`
//! and a second trade-off at `G`; `C` separates the trade-offs from `A`.

use crate::network::Network;
use crate::query::Query;
use crate::sign::Sign::{Minus, Plus};

pub fn trade_off() -> Network {
    trade_off_builder().build().expect("fixture is valid")
}

fn trade_off_builder() -> crate::network::NetworkBuilder {
    Network::builder()
        .nodes(["H", "U", "W", "I", "D", "G", "C", "B", "A"])
        .arc("H", "U", Plus)
        .arc("H", "W", Minus)
        .arc("U", "I", Plus)
        .arc("W", "I", Plus)
        .arc("I", "D", Plus)
        .arc("I", "G", Plus)
        .arc("D", "G", Minus)
        .arc("D", "C", Plus)
        .arc("G", "C", Minus)
        .arc("C", "B", Plus)
        .arc("B", "A", Minus)
        .arc("C", "A", Minus)
}

/// `trade_off` plus the peripheral nodes `E` (barren child of `D`), `J`
/// (extra cause of `C`), and `L`, `M` (ancestors of the observed `H`).
pub fn full_example() -> Network {
    trade_off_builder()
        .nodes(["E", "J", "L", "M"])
        .arc("D", "E", Plus)
        .arc("J", "C", Plus)
        .arc("L", "H", Plus)
        .arc("M", "L", Plus)
        .build()
        .expect("fixture is valid")
}

/// Observe `H = true`, nothing observed before, interest `A`.
pub fn trade_off_query() -> Query {
    Query::new([], ("H", true), "A")
}
