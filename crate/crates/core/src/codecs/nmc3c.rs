use std::sync::Arc;

use super::{Codeword3, SplitCodec};
use crate::auth::{mac_packed, MacParams};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::nmext::{NmExtractor, ParameterProfile, Pipeline};

/// Three-split code `(X, Y, (R_e xor M) || MAC(R_a, R_e xor M))` with
/// `R = R_e || R_a` the extractor output on `(X, Y)`.
#[derive(Clone, Debug)]
pub struct Nmc3c {
    ext: Arc<NmExtractor>,
    mac: MacParams,
}

fn mask(bits: usize) -> u64 {
    (1u64 << bits) - 1
}

impl Nmc3c {
    /// Uses the profile's tag length; the message takes the rest of `R`.
    pub fn new(profile: ParameterProfile, pipeline: Pipeline) -> Result<Self> {
        let t = profile.mac_tag();
        let m = profile.out_len().checked_sub(2 * t).filter(|&m| m > 0).ok_or_else(|| Error::Incompatible {
            scheme: "nmc3c".into(),
            what: format!("profile {} (out_len {} leaves no message room for a {t}-bit tag)", profile.name(), profile.out_len()),
        })?;
        Self::with_mac(Arc::new(NmExtractor::new(profile, pipeline)), MacParams::new(m, t)?)
    }

    pub fn with_mac(ext: Arc<NmExtractor>, mac: MacParams) -> Result<Self> {
        let out = ext.profile().out_len();
        if mac.msg_len() + mac.key_len() != out {
            return Err(Error::Incompatible {
                scheme: "nmc3c".into(),
                what: format!(
                    "MAC with m={} t={} (needs |M| + 2t = out_len = {out})",
                    mac.msg_len(),
                    mac.tag_len()
                ),
            });
        }
        Ok(Self { ext, mac })
    }

    pub fn profile(&self) -> &ParameterProfile {
        self.ext.profile()
    }

    pub fn extractor(&self) -> &Arc<NmExtractor> {
        &self.ext
    }

    pub fn mac_params(&self) -> &MacParams {
        &self.mac
    }

    pub fn z_len(&self) -> usize {
        self.mac.msg_len() + self.mac.tag_len()
    }

    pub fn encode(&self, msg: &BitString, rand: &BitString) -> Result<Codeword3> {
        check(self.message_len(), msg)?;
        check(self.randomness_len(), rand)?;
        let parts = self.encode_split(msg.to_u64(), rand.to_u64());
        let lens = self.split_lens();
        Ok(Codeword3 {
            x: BitString::from_u64(parts[0], lens[0]),
            y: BitString::from_u64(parts[1], lens[1]),
            z: BitString::from_u64(parts[2], lens[2]),
        })
    }

    pub fn decode(&self, c: &Codeword3) -> Result<Option<BitString>> {
        let lens = self.split_lens();
        for (len, part) in lens.iter().zip([&c.x, &c.y, &c.z]) {
            check(*len, part)?;
        }
        Ok(self
            .decode_split(&[c.x.to_u64(), c.y.to_u64(), c.z.to_u64()])
            .map(|m| BitString::from_u64(m, self.message_len())))
    }
}

fn check(expected: usize, v: &BitString) -> Result<()> {
    if v.len() != expected {
        return Err(Error::LengthMismatch { expected, actual: v.len() });
    }
    Ok(())
}

impl SplitCodec for Nmc3c {
    fn scheme(&self) -> &'static str {
        "nmc3c"
    }

    fn split_lens(&self) -> Vec<usize> {
        let p = self.profile();
        vec![p.n(), p.y_len(), self.z_len()]
    }

    fn message_len(&self) -> usize {
        self.mac.msg_len()
    }

    fn randomness_len(&self) -> usize {
        self.profile().randomness_len()
    }

    fn encode_split(&self, msg: u64, rand: u64) -> Vec<u64> {
        let yl = self.profile().y_len();
        let key_len = self.mac.key_len();
        let r = self.ext.eval_index(rand);
        let z1 = (r >> key_len) ^ msg;
        let tag = mac_packed(&self.mac, r & mask(key_len), z1);
        vec![rand >> yl, rand & mask(yl), (z1 << self.mac.tag_len()) | u64::from(tag)]
    }

    fn decode_split(&self, parts: &[u64]) -> Option<u64> {
        let yl = self.profile().y_len();
        let (t, key_len) = (self.mac.tag_len(), self.mac.key_len());
        let r = self.ext.eval_index((parts[0] << yl) | parts[1]);
        let (z1, z2) = (parts[2] >> t, parts[2] & mask(t));
        (u64::from(mac_packed(&self.mac, r & mask(key_len), z1)) == z2).then(|| z1 ^ (r >> key_len))
    }
}

pub fn nmc3c_encode(msg: &BitString, rand: &BitString, p: &ParameterProfile, mp: &MacParams) -> Result<Codeword3> {
    Nmc3c::with_mac(Arc::new(NmExtractor::new(p.clone(), Pipeline::Full)), mp.clone())?.encode(msg, rand)
}

/// `Some(message)` on a valid tag, `None` (the rejection symbol) otherwise.
pub fn nmc3c_decode(c: &Codeword3, p: &ParameterProfile, mp: &MacParams) -> Result<Option<BitString>> {
    Nmc3c::with_mac(Arc::new(NmExtractor::new(p.clone(), Pipeline::Full)), mp.clone())?.decode(c)
}

/// Three shares `[X, Y, Z]` of a message.
pub fn share3(msg: &BitString, rand: &BitString, p: &ParameterProfile) -> Result<[BitString; 3]> {
    let c = Nmc3c::new(p.clone(), Pipeline::Full)?.encode(msg, rand)?;
    Ok([c.x, c.y, c.z])
}

pub fn reconstruct3(shares: &[BitString; 3], p: &ParameterProfile) -> Result<Option<BitString>> {
    let [x, y, z] = shares.clone();
    Nmc3c::new(p.clone(), Pipeline::Full)?.decode(&Codeword3 { x, y, z })
}
