//! Static data for the Solidity-specific operators.

use crate::frontend::lexer::{ETHER_UNITS, TIME_UNITS};

#[derive(Debug, Clone, Copy)]
pub struct UnitTable {
    pub ether_units: &'static [&'static str],
    pub time_units: &'static [&'static str],
}

pub const UNITS: UnitTable = UnitTable {
    ether_units: &ETHER_UNITS,
    time_units: &TIME_UNITS,
};

#[derive(Debug, Clone, Copy)]
pub struct GlobalTable {
    pub address_globals: &'static [&'static str],
    pub value_globals: &'static [&'static str],
    pub math_functions: &'static [&'static str],
}

pub const GLOBALS: GlobalTable = GlobalTable {
    address_globals: &["msg.sender", "tx.origin", "block.coinbase"],
    value_globals: &[
        "now",
        "block.timestamp",
        "block.number",
        "msg.value",
        "block.difficulty",
        "block.gaslimit",
    ],
    math_functions: &["addmod", "mulmod"],
};
