//! Error type shared by the whole crate.

use thiserror::Error;

/// Errors reported by parsers, validators, generators and engines.
#[derive(Debug, Error)]
pub enum Error {
    /// A text input (game file, automaton file, witness file) is malformed.
    #[error("parse error: {0}")]
    Parse(String),
    /// A structurally well-formed input violates a semantic invariant.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// The input is too large for an exponential-cost construction and the
    /// caller did not override the size guard.
    #[error("size guard exceeded: {0}")]
    GuardExceeded(String),
    /// The requested combination of engine and objectives is not supported.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A witness failed to replay; the message names the violated clause.
    #[error("witness rejected: {0}")]
    WitnessRejected(String),
}

pub type Result<T> = std::result::Result<T, Error>;
