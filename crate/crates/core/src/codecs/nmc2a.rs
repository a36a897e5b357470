use std::sync::Arc;

use super::{Codeword2, SplitCodec};
use crate::auth::PermKey;
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::nmext::{NmExtractor, ParameterProfile, Pipeline};

/// Two-split code `(X, Y || P_R^-1(M))` where `R` keys an affine permutation
/// of `GF(2^m)` and `|R| = 2m`.
#[derive(Clone, Debug)]
pub struct Nmc2a {
    ext: Arc<NmExtractor>,
    field: FieldDescriptor,
    m: usize,
}

fn mask(bits: usize) -> u64 {
    (1u64 << bits) - 1
}

impl Nmc2a {
    pub fn new(profile: ParameterProfile, pipeline: Pipeline) -> Result<Self> {
        Self::from_extractor(Arc::new(NmExtractor::new(profile, pipeline)))
    }

    pub fn from_extractor(ext: Arc<NmExtractor>) -> Result<Self> {
        let out = ext.profile().out_len();
        if !out.is_multiple_of(2) || out > 32 {
            return Err(Error::Incompatible {
                scheme: "nmc2a".into(),
                what: format!("profile {} (out_len {out} must equal 2m)", ext.profile().name()),
            });
        }
        let m = out / 2;
        Ok(Self { field: FieldDescriptor::binary(m as u32)?, ext, m })
    }

    pub fn profile(&self) -> &ParameterProfile {
        self.ext.profile()
    }

    pub fn extractor(&self) -> &Arc<NmExtractor> {
        &self.ext
    }

    fn key(&self, r: u64) -> PermKey {
        let a = (r >> self.m) as u32;
        PermKey::from_parts(&self.field, if a == 0 { 1 } else { a }, (r & mask(self.m)) as u32)
    }

    pub fn encode(&self, msg: &BitString, rand: &BitString) -> Result<Codeword2> {
        check(self.m, msg)?;
        check(self.randomness_len(), rand)?;
        let parts = self.encode_split(msg.to_u64(), rand.to_u64());
        let lens = self.split_lens();
        Ok(Codeword2 { x: BitString::from_u64(parts[0], lens[0]), yz: BitString::from_u64(parts[1], lens[1]) })
    }

    pub fn decode(&self, c: &Codeword2) -> Result<BitString> {
        let lens = self.split_lens();
        check(lens[0], &c.x)?;
        check(lens[1], &c.yz)?;
        let m = self.decode_split(&[c.x.to_u64(), c.yz.to_u64()]).expect("this code never rejects");
        Ok(BitString::from_u64(m, self.m))
    }
}

fn check(expected: usize, v: &BitString) -> Result<()> {
    if v.len() != expected {
        return Err(Error::LengthMismatch { expected, actual: v.len() });
    }
    Ok(())
}

impl SplitCodec for Nmc2a {
    fn scheme(&self) -> &'static str {
        "nmc2a"
    }

    fn split_lens(&self) -> Vec<usize> {
        let p = self.profile();
        vec![p.n(), p.y_len() + self.m]
    }

    fn message_len(&self) -> usize {
        self.m
    }

    fn randomness_len(&self) -> usize {
        self.profile().randomness_len()
    }

    fn encode_split(&self, msg: u64, rand: u64) -> Vec<u64> {
        let yl = self.profile().y_len();
        let key = self.key(self.ext.eval_index(rand));
        let z = u64::from(key.invert_int(msg as u32));
        vec![rand >> yl, ((rand & mask(yl)) << self.m) | z]
    }

    fn decode_split(&self, parts: &[u64]) -> Option<u64> {
        let yl = self.profile().y_len();
        let y = parts[1] >> self.m;
        let z = parts[1] & mask(self.m);
        let key = self.key(self.ext.eval_index((parts[0] << yl) | y));
        Some(u64::from(key.apply_int(z as u32)))
    }
}

pub fn nmc2a_encode(msg: &BitString, rand: &BitString, p: &ParameterProfile) -> Result<Codeword2> {
    Nmc2a::new(p.clone(), Pipeline::Full)?.encode(msg, rand)
}

/// Never rejects: the code carries no authentication.
pub fn nmc2a_decode(c: &Codeword2, p: &ParameterProfile) -> Result<BitString> {
    Nmc2a::new(p.clone(), Pipeline::Full)?.decode(c)
}
