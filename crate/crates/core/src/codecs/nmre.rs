use std::sync::Arc;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::nmext::{two_nmext, NmExtractor, ParameterProfile, Pipeline};

/// A random message with its two-part encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NmreOutput {
    pub message: BitString,
    pub x: BitString,
    pub y: BitString,
}

/// Splits `n + delta n` bits of randomness into `(x, y)` and extracts the message.
pub fn nmre_encode(randomness: &BitString, p: &ParameterProfile) -> Result<NmreOutput> {
    if randomness.len() != p.randomness_len() {
        return Err(Error::LengthMismatch { expected: p.randomness_len(), actual: randomness.len() });
    }
    let (x, y) = randomness.split_at(p.n())?;
    let message = two_nmext(&x, &y, p)?;
    Ok(NmreOutput { message, x, y })
}

pub fn nmre_decode(x: &BitString, y: &BitString, p: &ParameterProfile) -> Result<BitString> {
    two_nmext(x, y, p)
}

/// Randomness encoder bound to a (possibly tabulated) extractor.
#[derive(Clone, Debug)]
pub struct Nmre {
    ext: Arc<NmExtractor>,
}

impl Nmre {
    pub fn new(profile: ParameterProfile, pipeline: Pipeline) -> Self {
        Self { ext: Arc::new(NmExtractor::new(profile, pipeline)) }
    }

    pub fn from_extractor(ext: Arc<NmExtractor>) -> Self {
        Self { ext }
    }

    pub fn extractor(&self) -> &Arc<NmExtractor> {
        &self.ext
    }

    pub fn profile(&self) -> &ParameterProfile {
        self.ext.profile()
    }

    pub fn encode(&self, randomness: &BitString) -> Result<NmreOutput> {
        let p = self.profile();
        if randomness.len() != p.randomness_len() {
            return Err(Error::LengthMismatch { expected: p.randomness_len(), actual: randomness.len() });
        }
        let (x, y) = randomness.split_at(p.n())?;
        let message = self.ext.eval(&x, &y)?;
        Ok(NmreOutput { message, x, y })
    }

    pub fn decode(&self, x: &BitString, y: &BitString) -> Result<BitString> {
        self.ext.eval(x, y)
    }

    /// Message for the packed pair `(x, y)`.
    pub fn decode_int(&self, x: u64, y: u64) -> u64 {
        self.ext.eval_index((x << self.profile().y_len()) | y)
    }
}
