//! Gossip averaging among mobile agents, with spectral, comparison and
//! canonical-path bounds on the averaging time.

pub mod bounds;
pub mod chain;
pub mod error;
pub mod gossip;
pub mod harness;
pub mod mobility;
pub mod topology;

pub use error::{Error, Result};
