//! Library side of the `ouqubits` command-line tool. The binary is a thin
//! wrapper around these modules.

pub mod args;
pub mod config;
pub mod csv;
pub mod figures;
pub mod noise;
pub mod range;
pub mod sweep;
pub mod verify;
