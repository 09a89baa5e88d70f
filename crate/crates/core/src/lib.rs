//! Security analysis of the d-dimensional two-way deterministic LM05
//! quantum key distribution protocol.
//!
//! The crate is organised bottom-up:
//!
//! - [`qudit`]: dense operator algebra, state constructors and entropies.
//! - [`channels`]: Kraus noise channels and their two-way action.
//! - [`individual`]: closed-form cloning-attack analysis.
//! - [`collective`]: purified-protocol statistics and collective-attack key rates.
//! - [`montecarlo`]: seeded round-by-round protocol simulation.

pub mod channels;
pub mod collective;
pub mod curve;
pub mod error;
pub mod individual;
pub mod montecarlo;
pub mod qudit;

pub use error::{Error, Result};
