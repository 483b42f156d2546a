//! Benchmark networks bundled with the crate.

use crate::formats::{parse_edge_list, EdgeList};

const ASIA: &str = include_str!("../fixtures/asia.txt");
const SACHS: &str = include_str!("../fixtures/sachs.txt");
const CHAIN: &str = include_str!("../fixtures/chain.txt");
const COLLIDER: &str = include_str!("../fixtures/collider.txt");
pub const ASIA_BIF: &str = include_str!("../fixtures/asia.bif");

pub const NAMES: [&str; 4] = ["asia", "sachs", "chain", "collider"];

/// A bundled network by name.
pub fn fixture(name: &str) -> Option<EdgeList> {
    let text = match name {
        "asia" => ASIA,
        "sachs" => SACHS,
        "chain" => CHAIN,
        "collider" => COLLIDER,
        _ => return None,
    };
    Some(parse_edge_list(text).expect("bundled fixtures parse"))
}
