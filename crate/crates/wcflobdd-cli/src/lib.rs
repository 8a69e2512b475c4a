//! File formats, benchmark harness and command implementations behind the
//! `wcflobdd` binary.

pub mod bench;
pub mod circuit;
pub mod commands;
pub mod dump;
