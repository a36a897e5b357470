//! Exact rate identities. Each scheme's rate is a ratio of two affine
//! functions of `delta`; lengths scale with `n`, which cancels.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::codecs::{Nmc3c, SplitCodec};
use crate::error::{Error, Result};
use crate::nmext::{ParameterProfile, Pipeline};

pub type Q = Ratio<i64>;

fn q(a: i64, b: i64) -> Q {
    Q::new(a, b)
}

/// `c0 + c1 * delta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Affine {
    pub c0: Q,
    pub c1: Q,
}

impl Affine {
    pub fn new(c0: Q, c1: Q) -> Self {
        Self { c0, c1 }
    }

    pub fn constant(c0: Q) -> Self {
        Self::new(c0, Q::zero())
    }

    pub fn delta() -> Self {
        Self::new(Q::zero(), Q::one())
    }

    pub fn eval(&self, delta: Q) -> Q {
        self.c0 + self.c1 * delta
    }

    pub fn scale(&self, k: Q) -> Self {
        Self::new(self.c0 * k, self.c1 * k)
    }
}

impl std::ops::Add for Affine {
    type Output = Affine;
    fn add(self, o: Affine) -> Affine {
        Affine::new(self.c0 + o.c0, self.c1 + o.c1)
    }
}

impl std::ops::Sub for Affine {
    type Output = Affine;
    fn sub(self, o: Affine) -> Affine {
        Affine::new(self.c0 - o.c0, self.c1 - o.c1)
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.c1 < Q::zero() { '-' } else { '+' };
        write!(f, "{} {sign} {}d", self.c0, self.c1.abs())
    }
}

/// `num(delta) / den(delta)`.
#[derive(Clone, Copy, Debug)]
pub struct RateFormula {
    pub num: Affine,
    pub den: Affine,
}

impl RateFormula {
    pub fn new(num: Affine, den: Affine) -> Result<Self> {
        if den.c0.is_zero() && den.c1.is_zero() {
            return Err(Error::InvalidParameters("rate denominator is identically zero".into()));
        }
        Ok(Self { num, den })
    }

    pub fn eval(&self, delta: Q) -> Result<Q> {
        let d = self.den.eval(delta);
        if d.is_zero() {
            return Err(Error::InvalidParameters(format!("rate denominator vanishes at delta = {delta}")));
        }
        Ok(self.num.eval(delta) / d)
    }

    /// Value at `delta = 0`.
    pub fn limit(&self) -> Result<Q> {
        self.eval(Q::zero())
    }

    /// `1/rate - 1/limit` as a formula; it vanishes at `delta = 0`.
    pub fn overhead(&self) -> Result<RateFormula> {
        let inv = Q::one() / self.limit()?;
        RateFormula::new(self.den - self.num.scale(inv), self.num)
    }
}

/// Equality as rational functions: `a/b = c/d` iff `a d = c b` as polynomials.
impl PartialEq for RateFormula {
    fn eq(&self, o: &Self) -> bool {
        let (a, b, c, d) = (self.num, self.den, o.num, o.den);
        a.c0 * d.c0 == c.c0 * b.c0
            && a.c0 * d.c1 + a.c1 * d.c0 == c.c0 * b.c1 + c.c1 * b.c0
            && a.c1 * d.c1 == c.c1 * b.c1
    }
}

impl fmt::Display for RateFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Nmre,
    Nmc3c,
    Nmc2a,
    Qnmc,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Nmre, Scheme::Nmc3c, Scheme::Nmc2a, Scheme::Qnmc];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Nmre => "nmre",
            Scheme::Nmc3c => "nmc3c",
            Scheme::Nmc2a => "nmc2a",
            Scheme::Qnmc => "qnmc",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown scheme {s:?}")))
    }
}

/// Rate of each scheme as lengths in units of `n`, built from its components.
///
/// The extractor output is `1/2 - delta`. The 3-split code spends a tenth of
/// `delta` on the MAC key (tag half that); the 2-split code needs `|R| = 2|M|`;
/// the quantum code spends five bits of `R` per message qubit.
pub fn asymptotic_rate(scheme: Scheme) -> RateFormula {
    let one = Q::one();
    let d = Affine::delta();
    let out = Affine::constant(q(1, 2)) - d;
    let sources = Affine::constant(one) + d;
    let (msg, total) = match scheme {
        Scheme::Nmre => (out, sources),
        Scheme::Nmc3c => {
            let key = d.scale(q(1, 10));
            let msg = out - key;
            (msg, sources + msg + key.scale(q(1, 2)))
        }
        Scheme::Nmc2a => {
            let msg = out.scale(q(1, 2));
            (msg, sources + msg)
        }
        Scheme::Qnmc => {
            let msg = out.scale(q(1, 5));
            (msg, sources + msg)
        }
    };
    RateFormula::new(msg, total).expect("denominator has constant term")
}

/// Message and codeword sizes of a scheme at a concrete profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileRate {
    pub scheme: Scheme,
    pub message_len: usize,
    pub codeword_len: usize,
}

impl ProfileRate {
    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.message_len as u64, self.codeword_len as u64)
    }

    /// `delta'` in `rate = 1/(L + delta')`, where `1/L` is the scheme's limit.
    pub fn overhead(&self) -> Ratio<i64> {
        let limit = asymptotic_rate(self.scheme).limit().expect("limit exists");
        Q::new(self.codeword_len as i64, self.message_len as i64) - Q::one() / limit
    }
}

/// Exact sizes at a registered profile; qubits count as one unit each.
pub fn profile_rate(scheme: Scheme, p: &ParameterProfile) -> Result<ProfileRate> {
    let sources = p.randomness_len();
    let out = p.out_len();
    let incompatible = |what: String| Error::Incompatible { scheme: scheme.name().into(), what };
    let (message_len, extra) = match scheme {
        Scheme::Nmre => (out, 0),
        Scheme::Nmc3c => {
            let c = Nmc3c::new(p.clone(), Pipeline::Full)?;
            (c.message_len(), c.z_len())
        }
        Scheme::Nmc2a => {
            if !out.is_multiple_of(2) {
                return Err(incompatible(format!("profile {} (odd out_len {out})", p.name())));
            }
            (out / 2, out / 2)
        }
        Scheme::Qnmc => {
            if !out.is_multiple_of(5) {
                return Err(incompatible(format!("profile {} (out_len {out} is not 5m)", p.name())));
            }
            (out / 5, out / 5)
        }
    };
    Ok(ProfileRate { scheme, message_len, codeword_len: sources + extra })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nmext::profile;

    fn lit(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> RateFormula {
        RateFormula::new(Affine::new(q(a.0, a.1), q(b.0, b.1)), Affine::new(q(c.0, c.1), q(d.0, d.1))).unwrap()
    }

    #[test]
    fn closed_forms() {
        assert_eq!(asymptotic_rate(Scheme::Nmre), lit((1, 2), (-1, 1), (1, 1), (1, 1)));
        assert_eq!(asymptotic_rate(Scheme::Nmc3c), lit((1, 2), (-11, 10), (3, 2), (-1, 20)));
        assert_eq!(asymptotic_rate(Scheme::Nmc2a), lit((1, 4), (-1, 2), (5, 4), (1, 2)));
        assert_eq!(asymptotic_rate(Scheme::Qnmc), lit((1, 10), (-1, 5), (11, 10), (4, 5)));
        assert_ne!(asymptotic_rate(Scheme::Nmre), asymptotic_rate(Scheme::Nmc2a));
    }

    #[test]
    fn scaled_formulas_are_equal() {
        let f = asymptotic_rate(Scheme::Nmre);
        let g = RateFormula::new(f.num.scale(q(7, 3)), f.den.scale(q(7, 3))).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn overhead_vanishes() {
        for s in Scheme::ALL {
            let o = asymptotic_rate(s).overhead().unwrap();
            assert_eq!(o.limit().unwrap(), Q::zero(), "{s:?}");
        }
    }

    #[test]
    fn xs_sizes() {
        let xs = profile("XS").unwrap();
        let r = profile_rate(Scheme::Nmre, &xs).unwrap();
        assert_eq!(r.rate(), Ratio::new(4, 17));
        assert_eq!(r.overhead(), q(9, 4));
        assert!(profile_rate(Scheme::Qnmc, &xs).is_err());
        let s = profile("S").unwrap();
        assert_eq!(profile_rate(Scheme::Qnmc, &s).unwrap().rate(), Ratio::new(1, 20));
    }
}
