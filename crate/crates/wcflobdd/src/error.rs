use alloc::string::String;

use crate::semifield::Instance;

/// Errors raised by diagram construction and operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("the zero weight has no multiplicative inverse")]
    ZeroInverse,
    #[error("weights come from different instances ({0} and {1})")]
    InstanceMismatch(Instance, Instance),
    #[error("cannot parse weight `{0}`")]
    Parse(String),
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("assignment has {got} bits, expected {expected}")]
    AssignmentLength { got: usize, expected: usize },
    #[error("invalid grouping: {0}")]
    InvalidGrouping(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
