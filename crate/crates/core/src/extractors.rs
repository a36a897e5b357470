//! Inner-product two-source extractor and Toeplitz-hash seeded extractors.
//!
//! A Toeplitz extractor with source length `n` and output length `m` is fixed
//! by a diagonal vector `t` of `n + m - 1` bits: output bit `i` is the parity of
//! `t[i + k] & x_k` over `k`, where `x_k` is the source bit of weight `2^k`
//! (the source read as a big-endian integer). A seed of at least `n + m - 1`
//! bits supplies `t` directly from its first bits, which is the classical
//! 2-universal family. A shorter seed of `d` bits supplies `t[0..d]` and the
//! remaining diagonal entries are fixed public parities of the seed.

use rayon::prelude::*;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::field::{bits_to_values, values_to_bits, FieldDescriptor};

/// Largest source support accepted by [`uniformity_scan`].
pub const MAX_SCAN_SUPPORT: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtractorFamily {
    HashBased,
    TrevisanStub,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeededExtractorSpec {
    pub source_len: usize,
    pub seed_len: usize,
    pub output_len: usize,
    pub min_entropy: usize,
    pub error: f64,
    pub family: ExtractorFamily,
}

impl SeededExtractorSpec {
    /// Hash-based spec with the full Toeplitz seed length `n + m - 1`.
    pub fn toeplitz(source_len: usize, output_len: usize, min_entropy: usize) -> Self {
        let seed_len = source_len + output_len - 1;
        Self {
            source_len,
            seed_len,
            output_len,
            min_entropy,
            error: lhl_bound(output_len, min_entropy),
            family: ExtractorFamily::HashBased,
        }
    }

    /// Hash-based spec with an explicit (possibly short) seed length.
    pub fn hashed(source_len: usize, seed_len: usize, output_len: usize, min_entropy: usize) -> Self {
        Self {
            source_len,
            seed_len,
            output_len,
            min_entropy,
            error: lhl_bound(output_len, min_entropy),
            family: ExtractorFamily::HashBased,
        }
    }

    pub fn diagonal_len(&self) -> usize {
        self.source_len + self.output_len - 1
    }

    /// True when the seed determines the whole diagonal (exact 2-universal family).
    pub fn is_universal(&self) -> bool {
        self.seed_len >= self.diagonal_len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.family == ExtractorFamily::TrevisanStub {
            return Err(Error::Unsupported("the trevisan_stub family is reserved".into()));
        }
        if self.source_len == 0 || self.output_len == 0 || self.seed_len == 0 {
            return Err(Error::InvalidParameters("extractor lengths must be positive".into()));
        }
        if self.output_len > self.source_len {
            return Err(Error::InvalidParameters(format!(
                "output length {} exceeds source length {}",
                self.output_len, self.source_len
            )));
        }
        Ok(())
    }
}

/// Leftover-hash error bound `1/2 * sqrt(2^(m-k))`.
pub fn lhl_bound(m: usize, k: usize) -> f64 {
    0.5 * (2f64).powf((m as f64 - k as f64) / 2.0)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Public mask over seed bits defining diagonal entry `p >= d`.
fn expansion_mask(p: usize, d: usize) -> Vec<bool> {
    let mut mask: Vec<bool> = (0..d)
        .map(|j| splitmix64(((p as u64) << 32) ^ j as u64 ^ 0x5eed) & 1 == 1)
        .collect();
    if !mask.iter().any(|&b| b) {
        mask[p % d] = true;
    }
    mask
}

/// A seeded extractor with its seed expansion precomputed.
#[derive(Clone, Debug)]
pub struct Toeplitz {
    spec: SeededExtractorSpec,
    /// For diagonal positions at or beyond the seed length: mask over seed bits.
    masks: Vec<Vec<bool>>,
    shift: Option<Shift>,
    fast: Option<FastToeplitz>,
}

/// Public affine offsets: a constant added to the diagonal and an output
/// offset given by fixed parities of the seed plus a constant.
#[derive(Clone, Debug)]
struct Shift {
    diag: Vec<bool>,
    out_masks: Vec<Vec<bool>>,
    out_const: Vec<bool>,
}

impl Shift {
    fn new(spec: &SeededExtractorSpec) -> Self {
        let tag = ((spec.source_len as u64) << 48) ^ ((spec.seed_len as u64) << 32) ^ ((spec.output_len as u64) << 16);
        let bit = |i: u64| splitmix64(tag ^ i ^ 0xaff1_0000_0000) & 1 == 1;
        let d = spec.seed_len as u64;
        Self {
            diag: (0..spec.diagonal_len() as u64).map(bit).collect(),
            out_masks: (0..spec.output_len as u64)
                .map(|i| (0..d).map(|j| bit(0x1_0000 + (i << 8) + j)).collect())
                .collect(),
            out_const: (0..spec.output_len as u64).map(|i| bit(0x2_0000 + i)).collect(),
        }
    }
}

#[derive(Clone, Debug)]
struct FastToeplitz {
    /// Seed bit `j` sits at integer weight `2^(d-1-j)`.
    masks: Vec<u128>,
    x_mask: u64,
    diag_shift: u128,
    out_masks: Vec<u128>,
    out_const: u64,
}

fn pack_seed_mask(mask: &[bool], d: usize) -> u128 {
    mask.iter().enumerate().fold(0u128, |acc, (j, &b)| acc | (u128::from(b) << (d - 1 - j)))
}

impl Toeplitz {
    pub fn new(spec: &SeededExtractorSpec) -> Result<Self> {
        Self::build(spec, None)
    }

    /// Affine variant `x -> T(s ^ c) x ^ b(s)` with public `c` and `b`. The
    /// collision probability over uniform seeds equals the linear family's,
    /// and no input is mapped to zero for every seed.
    pub fn affine(spec: &SeededExtractorSpec) -> Result<Self> {
        Self::build(spec, Some(Shift::new(spec)))
    }

    pub fn is_affine(&self) -> bool {
        self.shift.is_some()
    }

    fn build(spec: &SeededExtractorSpec, shift: Option<Shift>) -> Result<Self> {
        spec.validate()?;
        let d = spec.seed_len;
        let masks: Vec<Vec<bool>> = (d.min(spec.diagonal_len())..spec.diagonal_len())
            .map(|p| expansion_mask(p, d))
            .collect();
        let fast = (spec.source_len <= 64 && spec.output_len <= 64 && d <= 128 && spec.diagonal_len() <= 128)
            .then(|| FastToeplitz {
                masks: masks.iter().map(|m| pack_seed_mask(m, d)).collect(),
                x_mask: if spec.source_len == 64 { u64::MAX } else { (1u64 << spec.source_len) - 1 },
                diag_shift: shift.as_ref().map_or(0, |s| {
                    s.diag.iter().enumerate().fold(0u128, |acc, (p, &b)| acc | (u128::from(b) << p))
                }),
                out_masks: shift.as_ref().map_or_else(Vec::new, |s| s.out_masks.iter().map(|m| pack_seed_mask(m, d)).collect()),
                out_const: shift.as_ref().map_or(0, |s| s.out_const.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))),
            });
        Ok(Self { spec: spec.clone(), masks, shift, fast })
    }

    pub fn spec(&self) -> &SeededExtractorSpec {
        &self.spec
    }

    fn diagonal(&self, seed: &BitString) -> Vec<bool> {
        let d = self.spec.seed_len;
        let direct = d.min(self.spec.diagonal_len());
        let mut t: Vec<bool> = (0..direct).map(|p| seed.get(p)).collect();
        for mask in &self.masks {
            let bit = mask.iter().enumerate().fold(false, |acc, (j, &m)| acc ^ (m && seed.get(j)));
            t.push(bit);
        }
        if let Some(sh) = &self.shift {
            t.iter_mut().zip(&sh.diag).for_each(|(a, &b)| *a ^= b);
        }
        t
    }

    pub fn apply(&self, x: &BitString, seed: &BitString) -> Result<BitString> {
        let (n, m) = (self.spec.source_len, self.spec.output_len);
        if x.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: x.len() });
        }
        if seed.len() != self.spec.seed_len {
            return Err(Error::LengthMismatch { expected: self.spec.seed_len, actual: seed.len() });
        }
        if self.fast.is_some() {
            let seed_int = seed.iter().fold(0u128, |acc, b| (acc << 1) | u128::from(b));
            return Ok(BitString::from_u64(self.apply_int(x.to_u64(), seed_int), m));
        }
        Ok(self.apply_bitwise(x, seed))
    }

    fn apply_bitwise(&self, x: &BitString, seed: &BitString) -> BitString {
        let (n, m) = (self.spec.source_len, self.spec.output_len);
        let t = self.diagonal(seed);
        BitString::from_bits((0..m).map(|i| {
            let lin = (0..n).fold(false, |acc, k| acc ^ (t[i + k] && x.get(n - 1 - k)));
            match &self.shift {
                None => lin,
                Some(sh) => {
                    let par = sh.out_masks[i].iter().enumerate().fold(false, |acc, (j, &b)| acc ^ (b && seed.get(j)));
                    lin ^ par ^ sh.out_const[i]
                }
            }
        }))
    }

    /// Integer fast path: `x` and `seed` are big-endian integers of the
    /// declared lengths, result is the big-endian output integer.
    ///
    /// # Panics
    /// Panics if the spec exceeds the 64-bit source / 128-bit diagonal limits.
    #[inline]
    pub fn apply_int(&self, x: u64, seed: u128) -> u64 {
        let fast = self.fast.as_ref().expect("integer path needs n <= 64 and n + m - 1 <= 128");
        let (m, d, dl) = (self.spec.output_len, self.spec.seed_len, self.spec.diagonal_len());
        // diag bit p at weight 2^p
        let mut diag: u128 = 0;
        let direct = d.min(dl);
        for p in 0..direct {
            diag |= ((seed >> (d - 1 - p)) & 1) << p;
        }
        for (i, &mask) in fast.masks.iter().enumerate() {
            diag |= u128::from((seed & mask).count_ones() & 1) << (direct + i);
        }
        diag ^= fast.diag_shift;
        let x = x & fast.x_mask;
        let mut out = 0u64;
        for i in 0..m {
            let row = (diag >> i) as u64 & fast.x_mask;
            let mut bit = (row & x).count_ones() & 1;
            if let Some(&om) = fast.out_masks.get(i) {
                bit ^= (seed & om).count_ones() & 1;
            }
            out = (out << 1) | u64::from(bit);
        }
        out ^ fast.out_const
    }
}

/// Seed for which the `n -> n` Toeplitz matrix is the identity.
pub fn identity_seed(n: usize) -> BitString {
    let mut s = BitString::zeros(2 * n - 1);
    s.set(n - 1, true);
    s
}

pub fn ext(x: &BitString, seed: &BitString, spec: &SeededExtractorSpec) -> Result<BitString> {
    Toeplitz::new(spec)?.apply(x, seed)
}

/// Exact statistical distance of `(Ext(X, S), S)` from uniform, where `source`
/// lists support points with probabilities and `S` is a uniform seed.
pub fn uniformity_scan(spec: &SeededExtractorSpec, source: &[(BitString, f64)]) -> Result<f64> {
    if source.len() > MAX_SCAN_SUPPORT {
        return Err(Error::SpaceTooLarge { bits: usize::BITS as usize - source.len().leading_zeros() as usize, limit: 20 });
    }
    if spec.seed_len > 30 || spec.output_len > 24 {
        return Err(Error::SpaceTooLarge { bits: spec.seed_len + spec.output_len, limit: 30 });
    }
    let h = Toeplitz::new(spec)?;
    if h.fast.is_none() {
        return Err(Error::Unsupported("scan needs the integer path".into()));
    }
    let mut points = Vec::with_capacity(source.len());
    for (x, p) in source {
        if x.len() != spec.source_len {
            return Err(Error::LengthMismatch { expected: spec.source_len, actual: x.len() });
        }
        points.push((x.to_u64(), *p));
    }
    let outs = 1usize << spec.output_len;
    let uniform = 1.0 / outs as f64;
    let per_seed: Vec<f64> = (0..1u128 << spec.seed_len)
        .into_par_iter()
        .map_init(
            || vec![0f64; outs],
            |hist, seed| {
                hist.iter_mut().for_each(|v| *v = 0.0);
                for &(x, p) in &points {
                    hist[h.apply_int(x, seed) as usize] += p;
                }
                0.5 * hist.iter().map(|&v| (v - uniform).abs()).sum::<f64>()
            },
        )
        .collect();
    // fixed summation order for determinism
    Ok(per_seed.iter().sum::<f64>() / (1u128 << spec.seed_len) as f64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpSpec {
    field: FieldDescriptor,
    blocks: usize,
}

impl IpSpec {
    pub fn new(field: FieldDescriptor, blocks: usize) -> Result<Self> {
        if field.bits_per_element().is_none() {
            return Err(Error::Unsupported("inner product needs a binary field".into()));
        }
        if blocks == 0 {
            return Err(Error::InvalidParameters("inner product needs at least one block".into()));
        }
        Ok(Self { field, blocks })
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn symbol_bits(&self) -> usize {
        self.field.degree() as usize
    }

    pub fn input_len(&self) -> usize {
        self.blocks * self.symbol_bits()
    }
}

/// `sum x_i * y_i` over the spec's field, as one packed symbol.
pub fn ip(x: &BitString, y: &BitString, spec: &IpSpec) -> Result<BitString> {
    for v in [x, y] {
        if v.len() != spec.input_len() {
            return Err(Error::LengthMismatch { expected: spec.input_len(), actual: v.len() });
        }
    }
    let xs = bits_to_values(x, &spec.field)?;
    let ys = bits_to_values(y, &spec.field)?;
    let f = &spec.field;
    let acc = xs.iter().zip(&ys).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
    values_to_bits(&[acc], f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        BitString::from_binary_str(s).unwrap()
    }

    #[test]
    fn ip_single_bit_is_and() {
        let spec = IpSpec::new(FieldDescriptor::binary(1).unwrap(), 1).unwrap();
        assert_eq!(ip(&bs("1"), &bs("1"), &spec).unwrap(), bs("1"));
        assert_eq!(ip(&bs("1"), &bs("0"), &spec).unwrap(), bs("0"));
    }

    #[test]
    fn ip_gf4_cancels() {
        // x = (1, a), y = (a, 1): a + a = 0
        let spec = IpSpec::new(FieldDescriptor::binary(2).unwrap(), 2).unwrap();
        assert_eq!(ip(&bs("0110"), &bs("1001"), &spec).unwrap(), bs("00"));
        assert!(ip(&bs("011"), &bs("1001"), &spec).is_err());
    }

    #[test]
    fn ip_bilinear_exhaustive() {
        // 12-bit inputs: 3 blocks over GF(16)
        let spec = IpSpec::new(FieldDescriptor::binary(4).unwrap(), 3).unwrap();
        let y_samples: Vec<BitString> = (0..4096u64).step_by(97).map(|v| BitString::from_u64(v, 12)).collect();
        for y in &y_samples {
            assert!(ip(&BitString::zeros(12), y, &spec).unwrap().is_zero());
            let vals: Vec<BitString> = (0..4096u64).map(|v| ip(&BitString::from_u64(v, 12), y, &spec).unwrap()).collect();
            for a in (0..4096u64).step_by(13) {
                for b in (0..4096u64).step_by(29) {
                    let lhs = &vals[(a ^ b) as usize];
                    let rhs = vals[a as usize].xor(&vals[b as usize]).unwrap();
                    assert_eq!(lhs, &rhs);
                }
            }
        }
    }

    #[test]
    fn identity_seed_is_identity() {
        for n in 1..=8 {
            let spec = SeededExtractorSpec::toeplitz(n, n, n);
            let s = identity_seed(n);
            for x in BitString::all(n) {
                assert_eq!(ext(&x, &s, &spec).unwrap(), x);
            }
        }
    }

    #[test]
    fn parity_row() {
        let spec = SeededExtractorSpec::toeplitz(2, 1, 1);
        assert_eq!(ext(&bs("10"), &bs("11"), &spec).unwrap(), bs("1"));
        assert_eq!(ext(&bs("11"), &bs("11"), &spec).unwrap(), bs("0"));
    }

    #[test]
    fn two_point_source_n4_m1() {
        let spec = SeededExtractorSpec::toeplitz(4, 1, 1);
        let src = vec![(bs("0000"), 0.5), (bs("1111"), 0.5)];
        let d = uniformity_scan(&spec, &src).unwrap();
        // oracle: seed t (4 bits) maps 1111 to parity(t); 0000 always to 0
        let mut acc = 0.0;
        for t in 0..16u32 {
            let out1 = t.count_ones() & 1;
            let p0 = if out1 == 0 { 1.0 } else { 0.5 };
            acc += 0.5 * ((p0 - 0.5f64).abs() + ((1.0 - p0) - 0.5f64).abs());
        }
        assert!((d - acc / 16.0).abs() < 1e-12);
        assert!(d <= lhl_bound(1, 1) + 1e-12);
    }

    #[test]
    fn uniform_source_gives_zero_for_parity() {
        let spec = SeededExtractorSpec::toeplitz(3, 1, 3);
        let src: Vec<(BitString, f64)> = BitString::all(3).map(|x| (x, 0.125)).collect();
        // nonzero seeds: parity is balanced; zero seed: constant 0, distance 1/2
        let d = uniformity_scan(&spec, &src).unwrap();
        assert!((d - 0.5 / 8.0).abs() < 1e-12);
        // the 2-universal family allows this: bound is 1/2 * sqrt(2^-2) = 1/4
        assert!(d <= lhl_bound(1, 3));
    }

    #[test]
    fn point_mass_is_reported() {
        let spec = SeededExtractorSpec::toeplitz(4, 2, 0);
        let d = uniformity_scan(&spec, &[(bs("1010"), 1.0)]).unwrap();
        assert!((d - 0.75).abs() < 1e-12);
    }

    #[test]
    fn trevisan_stub_unsupported() {
        let mut spec = SeededExtractorSpec::toeplitz(4, 2, 2);
        spec.family = ExtractorFamily::TrevisanStub;
        assert!(matches!(Toeplitz::new(&spec), Err(Error::Unsupported(_))));
    }

    #[test]
    fn short_seed_expansion_is_deterministic_and_linear() {
        let spec = SeededExtractorSpec::hashed(10, 3, 4, 4);
        let h = Toeplitz::new(&spec).unwrap();
        for s in BitString::all(3) {
            for x in (0..1024u64).step_by(37) {
                let a = BitString::from_u64(x, 10);
                let b = BitString::from_u64(x.wrapping_mul(7) & 1023, 10);
                let lhs = h.apply(&a.xor(&b).unwrap(), &s).unwrap();
                let rhs = h.apply(&a, &s).unwrap().xor(&h.apply(&b, &s).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    proptest! {
        #[test]
        fn fast_path_matches_bitwise(n in 1usize..20, m in 1usize..8, d in 1usize..30, x in any::<u64>(), s in any::<u64>()) {
            prop_assume!(m <= n);
            let spec = SeededExtractorSpec::hashed(n, d, m, n);
            let xb = BitString::from_u64(x & ((1 << n) - 1), n);
            let sb = BitString::from_u64(s & ((1 << d) - 1), d);
            let h = Toeplitz::new(&spec).unwrap();
            let t = h.diagonal(&sb);
            let slow = BitString::from_bits((0..m).map(|i| {
                (0..n).fold(false, |acc, k| acc ^ (t[i + k] && xb.get(n - 1 - k)))
            }));
            prop_assert_eq!(h.apply(&xb, &sb).unwrap(), slow);
            let a = Toeplitz::affine(&spec).unwrap();
            prop_assert_eq!(a.apply(&xb, &sb).unwrap(), a.apply_bitwise(&xb, &sb));
        }
    }

    #[test]
    fn affine_keeps_collision_counts() {
        for (n, m) in [(3usize, 2usize), (4, 1), (5, 3)] {
            let spec = SeededExtractorSpec::toeplitz(n, m, n);
            let lin = Toeplitz::new(&spec).unwrap();
            let aff = Toeplitz::affine(&spec).unwrap();
            for x in 0..1u64 << n {
                for x2 in x + 1..1u64 << n {
                    let count = |h: &Toeplitz| {
                        (0..1u128 << spec.seed_len).filter(|&s| h.apply_int(x, s) == h.apply_int(x2, s)).count()
                    };
                    assert_eq!(count(&lin), count(&aff));
                }
            }
            assert!((0..1u128 << spec.seed_len).any(|s| aff.apply_int(0, s) != 0));
        }
    }
}
