//! Unified-(q,s) entanglement and monogamy relations for generalized
//! W-class states.

pub mod cli;
pub mod concurrence;
pub mod error;
pub mod monogamy;
pub mod pre;
pub mod states;
pub mod suite;
pub mod table;
pub mod unified;

pub use error::{Error, Result};
