//! Split-state non-malleable codes for classical and quantum messages, built
//! on a two-source non-malleable extractor, with exact tampering experiments.

pub mod auth;
pub mod bits;
pub mod cli;
pub mod codecs;
pub mod codes;
pub mod error;
pub mod extractors;
pub mod field;
pub mod harness;
pub mod nmext;
pub mod quantum;
pub mod rate;

pub use bits::BitString;
pub use error::{Error, Result};
