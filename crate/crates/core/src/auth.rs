//! One-time polynomial MAC and the affine pairwise-independent permutation family.

use num_rational::Ratio;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::field::{bits_to_values, FieldDescriptor};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacParams {
    msg_len: usize,
    tag_len: usize,
    field: FieldDescriptor,
}

impl MacParams {
    pub fn new(msg_len: usize, tag_len: usize) -> Result<Self> {
        if msg_len == 0 || tag_len == 0 || tag_len > 16 {
            return Err(Error::InvalidParameters(format!("MAC needs m >= 1 and 1 <= t <= 16, got m={msg_len} t={tag_len}")));
        }
        Ok(Self { msg_len, tag_len, field: FieldDescriptor::binary(tag_len as u32)? })
    }

    /// Tag length `t = ceil(log2 m + log2(1/eps))` for a target error.
    pub fn for_target(msg_len: usize, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameters(format!("MAC target error {eps} not in (0,1)")));
        }
        let t = ((msg_len as f64).log2() + (1.0 / eps).log2()).ceil().max(1.0) as usize;
        Self::new(msg_len, t)
    }

    pub fn msg_len(&self) -> usize {
        self.msg_len
    }

    pub fn tag_len(&self) -> usize {
        self.tag_len
    }

    pub fn key_len(&self) -> usize {
        2 * self.tag_len
    }

    /// Number of `GF(2^t)` coefficients carrying the message.
    pub fn blocks(&self) -> usize {
        self.msg_len.div_ceil(self.tag_len)
    }

    /// Forgery bound of the construction, `ceil(m/t) * 2^-t`.
    pub fn forgery_bound(&self) -> Ratio<u64> {
        Ratio::new(self.blocks() as u64, 1u64 << self.tag_len)
    }
}

fn check_len(expected: usize, v: &BitString) -> Result<()> {
    if v.len() != expected {
        return Err(Error::LengthMismatch { expected, actual: v.len() });
    }
    Ok(())
}

/// Tag for an integer key/message; used by enumeration loops.
pub(crate) fn mac_int(p: &MacParams, k1: u32, k2: u32, coeffs: &[u32]) -> u32 {
    let f = &p.field;
    // z * mu(z) by Horner, then shift once
    let mu = coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, k1), c));
    f.add(f.mul(mu, k1), k2)
}

/// Tag for a packed `2t`-bit key and `m`-bit message.
pub(crate) fn mac_packed(p: &MacParams, key: u64, msg: u64) -> u32 {
    let t = p.tag_len;
    let w = p.blocks() * t;
    let padded = msg << (w - p.msg_len);
    let coeffs: Vec<u32> = (0..p.blocks()).map(|i| ((padded >> (w - (i + 1) * t)) & ((1 << t) - 1)) as u32).collect();
    mac_int(p, (key >> t) as u32, (key & ((1 << t) - 1)) as u32, &coeffs)
}

fn coefficients(p: &MacParams, msg: &BitString) -> Result<Vec<u32>> {
    let padded = msg.pad_right(p.blocks() * p.tag_len - p.msg_len);
    bits_to_values(&padded, &p.field)
}

/// `tag = k1 * mu(k1) + k2` where `mu` has the message blocks as coefficients
/// (first block is the constant term).
pub fn mac(key: &BitString, msg: &BitString, p: &MacParams) -> Result<BitString> {
    check_len(p.key_len(), key)?;
    check_len(p.msg_len, msg)?;
    let k = key.to_u64();
    let k1 = (k >> p.tag_len) as u32;
    let k2 = (k & ((1 << p.tag_len) - 1)) as u32;
    let tag = mac_int(p, k1, k2, &coefficients(p, msg)?);
    Ok(BitString::from_u64(u64::from(tag), p.tag_len))
}

pub fn mac_verify(key: &BitString, msg: &BitString, tag: &BitString, p: &MacParams) -> Result<bool> {
    check_len(p.tag_len, tag)?;
    Ok(mac(key, msg, p)? == *tag)
}

/// Exact best substitution-forgery probability over uniform keys: the
/// adversary sees `(msg, tag)` and outputs any `(msg', tag')` with `msg' != msg`.
pub fn forgery_probability(p: &MacParams) -> Result<Ratio<u64>> {
    if p.msg_len > 12 || p.tag_len > 6 {
        return Err(Error::SpaceTooLarge { bits: p.msg_len + 2 * p.tag_len, limit: 24 });
    }
    let t = p.tag_len;
    let n_tags = 1usize << t;
    let msgs: Vec<Vec<u32>> = BitString::all(p.msg_len).map(|m| coefficients(p, &m).unwrap()).collect();
    // tags[msg][k1] for k2 = 0; the k2 offset is a translation
    let tags: Vec<Vec<u32>> = msgs
        .iter()
        .map(|c| (0..n_tags as u32).map(|k1| mac_int(p, k1, 0, c)).collect())
        .collect();
    let mut worst = Ratio::new(0, 1);
    let mut counts = vec![0u64; n_tags];
    for (i, ti) in tags.iter().enumerate() {
        let mut success = 0u64;
        for sigma in 0..n_tags as u32 {
            // keys (k1, k2) with tag sigma on msg i: k2 = sigma + ti[k1]
            let mut best = 0u64;
            for (j, tj) in tags.iter().enumerate() {
                if i == j {
                    continue;
                }
                counts.iter_mut().for_each(|c| *c = 0);
                for k1 in 0..n_tags {
                    let k2 = sigma ^ ti[k1];
                    counts[(tj[k1] ^ k2) as usize] += 1;
                }
                best = best.max(*counts.iter().max().unwrap());
            }
            success += best;
        }
        worst = worst.max(Ratio::new(success, 1u64 << (2 * t)));
    }
    Ok(worst)
}

/// Key of the permutation `mu -> a * mu + b` over `GF(2^m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermKey {
    field: FieldDescriptor,
    a: u32,
    b: u32,
}

impl PermKey {
    pub fn new(m: usize, a: u32, b: u32) -> Result<Self> {
        if m == 0 || m > 16 {
            return Err(Error::InvalidParameters(format!("permutation width {m} not in 1..=16")));
        }
        let field = FieldDescriptor::binary(m as u32)?;
        if a == 0 {
            return Err(Error::InvalidParameters("permutation key needs a != 0".into()));
        }
        if !field.contains(a) || !field.contains(b) {
            return Err(Error::InvalidParameters("permutation key outside the field".into()));
        }
        Ok(Self { field, a, b })
    }

    /// Key over an already-built field; `a` must be a nonzero element.
    pub(crate) fn from_parts(field: &FieldDescriptor, a: u32, b: u32) -> Self {
        debug_assert!(a != 0 && field.contains(a) && field.contains(b));
        Self { field: field.clone(), a, b }
    }

    pub fn width(&self) -> usize {
        self.field.degree() as usize
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub(crate) fn apply_int(&self, mu: u32) -> u32 {
        self.field.add(self.field.mul(self.a, mu), self.b)
    }

    pub(crate) fn invert_int(&self, img: u32) -> u32 {
        let a_inv = self.field.inv(self.a).expect("a is nonzero");
        self.field.mul(a_inv, self.field.sub(img, self.b))
    }
}

/// Splits `2m` raw bits into `(a, b)`, mapping `a = 0` to `a = 1`.
pub fn sample_perm_key(raw: &BitString) -> Result<PermKey> {
    if !raw.len().is_multiple_of(2) || raw.is_empty() {
        return Err(Error::LengthMismatch { expected: raw.len() + raw.len() % 2, actual: raw.len() });
    }
    let m = raw.len() / 2;
    let (a, b) = raw.split_at(m)?;
    let a = a.to_u64() as u32;
    PermKey::new(m, if a == 0 { 1 } else { a }, b.to_u64() as u32)
}

pub fn perm_apply(key: &PermKey, msg: &BitString) -> Result<BitString> {
    check_len(key.width(), msg)?;
    Ok(BitString::from_u64(u64::from(key.apply_int(msg.to_u64() as u32)), key.width()))
}

pub fn perm_invert(key: &PermKey, img: &BitString) -> Result<BitString> {
    check_len(key.width(), img)?;
    Ok(BitString::from_u64(u64::from(key.invert_int(img.to_u64() as u32)), key.width()))
}

/// Key distribution used when measuring pairwise independence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PermFamily {
    /// Uniform over the `(2^m - 1) 2^m` keys with `a != 0`.
    NonzeroA,
    /// Uniform raw `2m`-bit strings through [`sample_perm_key`].
    Remapped,
}

/// Maximum deviation of `Pr[P(mu1) = v1, P(mu2) = v2]` from `2^-2m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairwiseDeficit {
    /// Over all `mu1 != mu2` and all `(v1, v2)`.
    pub overall: Ratio<u64>,
    /// Restricted to `v1 != v2`.
    pub distinct_images: Ratio<u64>,
}

pub fn pairwise_deficit(m: usize, family: PermFamily) -> Result<PairwiseDeficit> {
    if m == 0 || m > 5 {
        return Err(Error::SpaceTooLarge { bits: 4 * m, limit: 20 });
    }
    let size = 1u32 << m;
    let keys: Vec<PermKey> = match family {
        PermFamily::NonzeroA => (1..size)
            .flat_map(|a| (0..size).map(move |b| (a, b)))
            .map(|(a, b)| PermKey::new(m, a, b))
            .collect::<Result<_>>()?,
        PermFamily::Remapped => BitString::all(2 * m).map(|r| sample_perm_key(&r)).collect::<Result<_>>()?,
    };
    let total = keys.len() as u64;
    let target = Ratio::new(1, u64::from(size) * u64::from(size));
    let dev = |c: u64| {
        let p = Ratio::new(c, total);
        if p > target {
            p - target
        } else {
            target - p
        }
    };
    let mut overall = Ratio::new(0, 1);
    let mut distinct = Ratio::new(0, 1);
    let mut counts = vec![0u64; (size * size) as usize];
    for mu1 in 0..size {
        for mu2 in (0..size).filter(|&v| v != mu1) {
            counts.iter_mut().for_each(|c| *c = 0);
            for k in &keys {
                counts[(k.apply_int(mu1) * size + k.apply_int(mu2)) as usize] += 1;
            }
            for v1 in 0..size {
                for v2 in 0..size {
                    let d = dev(counts[(v1 * size + v2) as usize]);
                    overall = overall.max(d);
                    if v1 != v2 {
                        distinct = distinct.max(d);
                    }
                }
            }
        }
    }
    Ok(PairwiseDeficit { overall, distinct_images: distinct })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        BitString::from_binary_str(s).unwrap()
    }

    #[test]
    fn zero_evaluation_point() {
        let p = MacParams::new(8, 4).unwrap();
        for k2 in 0..16u64 {
            let key = BitString::from_u64(k2, 8);
            for msg in BitString::all(8).step_by(17) {
                assert_eq!(mac(&key, &msg, &p).unwrap().to_u64(), k2);
            }
        }
    }

    #[test]
    fn gf4_constant_message() {
        // key (a, 0), msg = 1: tag = a * 1 = a
        let p = MacParams::new(2, 2).unwrap();
        assert_eq!(mac(&bs("1000"), &bs("01"), &p).unwrap(), bs("10"));
    }

    #[test]
    fn verify_and_reject() {
        let p = MacParams::new(8, 4).unwrap();
        let key = bs("10110011");
        let msg = bs("11010010");
        let mut tag = mac(&key, &msg, &p).unwrap();
        assert!(mac_verify(&key, &msg, &tag, &p).unwrap());
        tag.set(0, !tag.get(0));
        assert!(!mac_verify(&key, &msg, &tag, &p).unwrap());
        assert!(mac(&bs("1011"), &msg, &p).is_err());
    }

    #[test]
    fn accepting_keys_count() {
        for t in 1..=4usize {
            let p = MacParams::new(2 * t, t).unwrap();
            for msg in BitString::all(2 * t).step_by(3) {
                for tag in BitString::all(t) {
                    let n = BitString::all(2 * t).filter(|k| mac(k, &msg, &p).unwrap() == tag).count();
                    assert_eq!(n, 1 << t);
                }
            }
        }
    }

    #[test]
    fn for_target_tag_length() {
        assert_eq!(MacParams::for_target(8, 1.0 / 16.0).unwrap().tag_len(), 7);
        assert!(MacParams::for_target(8, 0.0).is_err());
    }

    #[test]
    fn small_forgery_within_bound() {
        let p = MacParams::new(4, 2).unwrap();
        let f = forgery_probability(&p).unwrap();
        assert!(f <= p.forgery_bound());
        assert!(f >= Ratio::new(1, 4));
    }

    #[test]
    fn perm_identity_and_translation() {
        let id = sample_perm_key(&BitString::zeros(6)).unwrap();
        assert_eq!((id.a(), id.b()), (1, 0));
        let t = PermKey::new(3, 1, 5).unwrap();
        for mu in BitString::all(3) {
            assert_eq!(perm_apply(&id, &mu).unwrap(), mu);
            assert_eq!(perm_apply(&t, &mu).unwrap(), mu.xor(&BitString::from_u64(5, 3)).unwrap());
        }
        assert!(PermKey::new(3, 0, 1).is_err());
    }

    #[test]
    fn remapped_a_distribution() {
        let m = 4;
        let mut counts = [0u32; 16];
        for raw in BitString::all(2 * m) {
            counts[sample_perm_key(&raw).unwrap().a() as usize] += 1;
        }
        assert_eq!(counts[0], 0);
        assert_eq!(counts[1], 2 * 16);
        assert!(counts[2..].iter().all(|&c| c == 16));
    }

    #[test]
    fn bijective_up_to_8_bits() {
        for m in 1..=8usize {
            for a in (1..1u32 << m).step_by(7) {
                let k = PermKey::new(m, a, (a * 3) % (1 << m)).unwrap();
                let mut seen = vec![false; 1 << m];
                for mu in 0..1u32 << m {
                    seen[k.apply_int(mu) as usize] = true;
                }
                assert!(seen.iter().all(|&s| s));
            }
        }
    }

    #[test]
    fn b_component_is_one_time_pad() {
        for m in [1usize, 4, 7] {
            let a = 1u32.max((1 << m) - 1);
            for mu in 0..1u32 << m {
                let mut seen = vec![0u32; 1 << m];
                for b in 0..1u32 << m {
                    seen[PermKey::new(m, a, b).unwrap().apply_int(mu) as usize] += 1;
                }
                assert!(seen.iter().all(|&c| c == 1));
            }
        }
    }

    proptest! {
        #[test]
        fn apply_invert_roundtrip(raw in any::<u16>(), mu in any::<u8>()) {
            let k = sample_perm_key(&BitString::from_u64(u64::from(raw), 16)).unwrap();
            let mu = BitString::from_u64(u64::from(mu), 8);
            prop_assert_eq!(perm_invert(&k, &perm_apply(&k, &mu).unwrap()).unwrap(), mu);
        }
    }
}
