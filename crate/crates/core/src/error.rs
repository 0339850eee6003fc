use alloc::boxed::Box;
use alloc::string::String;

use crate::curves::SegmentChain;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("construction: {0}")]
    Construction(String),
    #[error("disconnected surface: {0}")]
    Disconnected(String),
    #[error("structural: {0}")]
    Structural(String),
    #[error("trajectory runs into vertex {vertex} after length {at}")]
    ThroughVertex { vertex: usize, at: f64 },
    #[error("range: {0}")]
    Range(String),
    #[error("budget exhausted after {visited} developed triangles ({what})")]
    Budget { what: String, visited: usize },
    #[error("tighten did not converge within {iterations} moves")]
    NonConvergence { iterations: usize, best: Box<SegmentChain> },
    #[error("unsupported representation: {0}")]
    Unsupported(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}
