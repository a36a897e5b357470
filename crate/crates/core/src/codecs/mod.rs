//! Randomness encoder and split-state codes built on the non-malleable extractor.

mod codeword;
mod nmc2a;
mod nmc3c;
mod nmre;

pub use codeword::{format_decoded, parse_decoded, Codeword2, Codeword3, BOT_TOKEN};
pub use nmc2a::{nmc2a_decode, nmc2a_encode, Nmc2a};
pub use nmc3c::{nmc3c_decode, nmc3c_encode, reconstruct3, share3, Nmc3c};
pub use nmre::{nmre_decode, nmre_encode, Nmre, NmreOutput};

/// A split-state code with externalized randomness, on packed integers.
///
/// Messages, randomness and parts are big-endian integers of the declared
/// bit lengths. `decode_split` returns `None` for the rejection symbol.
pub trait SplitCodec: Sync {
    fn scheme(&self) -> &'static str;
    fn split_lens(&self) -> Vec<usize>;
    fn message_len(&self) -> usize;
    fn randomness_len(&self) -> usize;
    fn encode_split(&self, msg: u64, rand: u64) -> Vec<u64>;
    fn decode_split(&self, parts: &[u64]) -> Option<u64>;
}
