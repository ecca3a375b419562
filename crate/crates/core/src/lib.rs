//! Simulator for controlled secure direct communication over GHZ channels.
//!
//! Alice teleports message bits encoded as `|+>` / `|->` to Bob through
//! GHZ triplets shared with a controller, Charlie, whose X-basis result Bob
//! needs to recover each bit. The crate also models two eavesdropping
//! strategies and the channel tests that expose them.
//!
//! - [`qsim`]: dense statevector engine.
//! - [`protocol`]: encoding, controlled teleportation, sessions.
//! - [`security`]: channel sources, attacks and verification tests.
//! - [`cli`]: configuration, command dispatch and reports.

pub mod cli;
pub mod protocol;
pub mod qsim;
pub mod rng;
pub mod security;

use thiserror::Error;

pub use qsim::QsimError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error("message bit must be 0 or 1, got {0}")]
    InvalidBit(u8),
    #[error("sample count must be at least {min}, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("invalid probe specification: {0}")]
    InvalidProbe(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
