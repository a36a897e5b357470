use std::sync::OnceLock;

use rayon::prelude::*;

use super::profile::ParameterProfile;
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::extractors::IpSpec;

/// Largest input space the extractor will tabulate.
pub const MAX_TABLE_BITS: usize = 22;

/// Which variant of the extractor to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pipeline {
    Full,
    /// The advice string is replaced by `0^a` before the correlation breaker.
    AdviceAblated,
}

/// The advice string `X1 . Y1 . ECC(X)_R . ECC(Y || 0)_R`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdviceString {
    pub g: BitString,
    /// The index `R` selecting the codeword symbols.
    pub r: usize,
}

/// Intermediate registers of one evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub advice: AdviceString,
    pub z0: BitString,
    /// `Z_1 .. Z_a`.
    pub z: Vec<BitString>,
    pub s: BitString,
    pub l: BitString,
}

fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Inner product over `GF(2^w)` on big-endian packed integers.
fn ip_int(spec: &IpSpec, x: u64, y: u64) -> u64 {
    let f = spec.field();
    let w = spec.symbol_bits();
    let blocks = spec.blocks();
    let mut acc = 0u32;
    for i in 0..blocks {
        let shift = (blocks - 1 - i) * w;
        let xi = ((x >> shift) & mask(w)) as u32;
        let yi = ((y >> shift) & mask(w)) as u32;
        acc = f.add(acc, f.mul(xi, yi));
    }
    u64::from(acc)
}

impl ParameterProfile {
    fn check_sources(&self, x: &BitString, y: &BitString) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), actual: x.len() });
        }
        if y.len() != self.y_len() {
            return Err(Error::LengthMismatch { expected: self.y_len(), actual: y.len() });
        }
        Ok(())
    }

    /// Symbol `r` of the code applied to an `n`-bit message.
    fn ecc_symbol_int(&self, msg: u64, r: u32) -> u64 {
        let ecc = &self.roles().ecc;
        let f = ecc.field();
        let lq = self.log_q();
        let d = ecc.message_len();
        let padded = msg << (d * lq - self.n());
        let mut acc = 0u32;
        for i in (0..d).rev() {
            let c = ((padded >> ((d - 1 - i) * lq)) & mask(lq)) as u32;
            acc = f.add(f.mul(acc, r), c);
        }
        u64::from(acc)
    }

    /// Advice as an `a`-bit integer together with `R`.
    pub(crate) fn advice_int(&self, x: u64, y: u64) -> (u64, u32) {
        let (n, yl, k3) = (self.n(), self.y_len(), 3 * self.k());
        let lq = self.log_q();
        let x1 = x >> (n - k3);
        let y1 = y >> (yl - k3);
        let r = ip_int(&self.roles().ip1, x1, y1) as u32;
        let sx = self.ecc_symbol_int(x, r);
        let sy = self.ecc_symbol_int(y << (n - yl), r);
        let g = (((((x1 << k3) | y1) << lq) | sx) << lq) | sy;
        (g, r)
    }

    pub(crate) fn z0_int(&self, x: u64, y: u64) -> u64 {
        let k3 = 3 * self.k().pow(3);
        let spec = &self.roles().ip2;
        let pad = spec.input_len() - k3;
        let x2 = (x >> (self.n() - k3)) << pad;
        let y2 = (y >> (self.y_len() - k3)) << pad;
        ip_int(spec, x2, y2)
    }

    pub(crate) fn two_ff_int(&self, y: u64, x: u64, z: u64, g: bool) -> u64 {
        let r = self.roles();
        let (s, h) = (self.s(), self.h());
        let a = r.ext1.apply_int(y, u128::from(z >> (h - s)));
        let c = r.ext2.apply_int(z, u128::from(a));
        let b = r.ext1.apply_int(y, u128::from(c));
        let zbar = r.ext3.apply_int(x, u128::from(if g { b } else { a }));
        let a_bar = r.ext1.apply_int(y, u128::from(zbar >> (h - s)));
        let c_bar = r.ext2.apply_int(zbar, u128::from(a_bar));
        let b_bar = r.ext1.apply_int(y, u128::from(c_bar));
        r.ext3.apply_int(x, u128::from(if g { a_bar } else { b_bar }))
    }

    /// Runs the flip-flops over the advice bits, most significant first.
    pub(crate) fn advcb_steps(&self, y: u64, x: u64, z0: u64, g: u64, mut visit: impl FnMut(u64)) -> u64 {
        let a = self.a();
        let mut z = z0;
        for i in 0..a {
            let bit = (g >> (a - 1 - i)) & 1 == 1;
            z = self.two_ff_int(y, x, z, bit);
            visit(z);
        }
        self.roles().ext4.apply_int(y, u128::from(z))
    }

    /// Integer evaluation of the whole extractor.
    pub fn eval_int(&self, x: u64, y: u64, pipeline: Pipeline) -> u64 {
        let g = match pipeline {
            Pipeline::Full => self.advice_int(x, y).0,
            Pipeline::AdviceAblated => 0,
        };
        let z0 = self.z0_int(x, y);
        let s = self.advcb_steps(y, x, z0, g, |_| {});
        self.roles().ext6.apply_int(x, u128::from(s))
    }
}

pub fn advice_gen(x: &BitString, y: &BitString, p: &ParameterProfile) -> Result<AdviceString> {
    p.check_sources(x, y)?;
    let (g, r) = p.advice_int(x.to_u64(), y.to_u64());
    Ok(AdviceString { g: BitString::from_u64(g, p.a()), r: r as usize })
}

pub fn two_ff(y: &BitString, x: &BitString, z: &BitString, g_bit: bool, p: &ParameterProfile) -> Result<BitString> {
    p.check_sources(x, y)?;
    if z.len() != p.h() {
        return Err(Error::LengthMismatch { expected: p.h(), actual: z.len() });
    }
    Ok(BitString::from_u64(p.two_ff_int(y.to_u64(), x.to_u64(), z.to_u64(), g_bit), p.h()))
}

pub fn two_advcb(
    y: &BitString,
    x: &BitString,
    z0: &BitString,
    g: &AdviceString,
    p: &ParameterProfile,
) -> Result<BitString> {
    p.check_sources(x, y)?;
    if z0.len() != p.h() {
        return Err(Error::LengthMismatch { expected: p.h(), actual: z0.len() });
    }
    if g.g.len() != p.a() {
        return Err(Error::LengthMismatch { expected: p.a(), actual: g.g.len() });
    }
    let s = p.advcb_steps(y.to_u64(), x.to_u64(), z0.to_u64(), g.g.to_u64(), |_| {});
    Ok(BitString::from_u64(s, p.advcb_out()))
}

pub fn two_nmext(x: &BitString, y: &BitString, p: &ParameterProfile) -> Result<BitString> {
    two_nmext_with(x, y, p, Pipeline::Full)
}

pub fn two_nmext_with(x: &BitString, y: &BitString, p: &ParameterProfile, pipeline: Pipeline) -> Result<BitString> {
    p.check_sources(x, y)?;
    Ok(BitString::from_u64(p.eval_int(x.to_u64(), y.to_u64(), pipeline), p.out_len()))
}

/// Full evaluation recording every intermediate register.
pub fn two_nmext_trace(x: &BitString, y: &BitString, p: &ParameterProfile) -> Result<Trace> {
    let advice = advice_gen(x, y, p)?;
    let (xi, yi) = (x.to_u64(), y.to_u64());
    let z0 = p.z0_int(xi, yi);
    let mut z = Vec::with_capacity(p.a());
    let s = p.advcb_steps(yi, xi, z0, advice.g.to_u64(), |zi| z.push(BitString::from_u64(zi, p.h())));
    let l = p.roles().ext6.apply_int(xi, u128::from(s));
    Ok(Trace {
        advice,
        z0: BitString::from_u64(z0, p.h()),
        z,
        s: BitString::from_u64(s, p.advcb_out()),
        l: BitString::from_u64(l, p.out_len()),
    })
}

/// An extractor bound to a profile and pipeline, with an optional full
/// lookup table over all `(x, y)` for exhaustive experiments.
#[derive(Debug)]
pub struct NmExtractor {
    profile: ParameterProfile,
    pipeline: Pipeline,
    table: OnceLock<Vec<u32>>,
}

impl NmExtractor {
    pub fn new(profile: ParameterProfile, pipeline: Pipeline) -> Self {
        Self { profile, pipeline, table: OnceLock::new() }
    }

    pub fn profile(&self) -> &ParameterProfile {
        &self.profile
    }

    pub fn pipeline(&self) -> Pipeline {
        self.pipeline
    }

    pub fn eval(&self, x: &BitString, y: &BitString) -> Result<BitString> {
        two_nmext_with(x, y, &self.profile, self.pipeline)
    }

    /// Output on the joint index `x * 2^|y| + y`.
    pub fn eval_index(&self, idx: u64) -> u64 {
        if let Some(t) = self.table.get() {
            return u64::from(t[idx as usize]);
        }
        let yl = self.profile.y_len();
        self.profile.eval_int(idx >> yl, idx & mask(yl), self.pipeline)
    }

    /// Builds (once) and returns the table of all outputs.
    pub fn table(&self) -> Result<&[u32]> {
        let bits = self.profile.randomness_len();
        if bits > MAX_TABLE_BITS {
            return Err(Error::SpaceTooLarge { bits, limit: MAX_TABLE_BITS });
        }
        Ok(self.table.get_or_init(|| {
            let yl = self.profile.y_len();
            (0..1u64 << bits)
                .into_par_iter()
                .map(|i| self.profile.eval_int(i >> yl, i & mask(yl), self.pipeline) as u32)
                .collect()
        }))
    }
}
