use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_rational::Ratio;

use crate::codes::EccParams;
use crate::error::{Error, Result};
use crate::extractors::{IpSpec, SeededExtractorSpec, Toeplitz};
use crate::field::FieldDescriptor;

/// Registry bundled with the crate.
pub const BUILTIN_REGISTRY: &str = include_str!("../../profiles/profiles.txt");

/// Environment variable naming a directory whose `profiles.txt` replaces the built-in registry.
pub const PROFILE_DIR_ENV: &str = "NMCODEX_PROFILE_DIR";

/// Raw constants of a profile as written in the registry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileParams {
    pub name: String,
    pub n: usize,
    pub delta_n: usize,
    pub k: usize,
    pub q: u32,
    pub v: u32,
    pub eps: Ratio<u64>,
    pub eps_prime: Ratio<u64>,
    pub s: usize,
    pub b: usize,
    pub h: usize,
    pub advcb_out: usize,
    /// Tag length `t` of the one-time MAC used by the 3-split classical code.
    pub mac_tag: usize,
}

/// The seeded extractors, inner products and code bound to each role.
#[derive(Debug)]
pub struct Roles {
    pub ext1: Toeplitz,
    pub ext2: Toeplitz,
    pub ext3: Toeplitz,
    pub ext4: Toeplitz,
    pub ext6: Toeplitz,
    pub ip1: IpSpec,
    pub ip2: IpSpec,
    pub ecc: EccParams,
}

/// A validated profile. Cheap to clone.
#[derive(Clone)]
pub struct ParameterProfile {
    params: Arc<ProfileParams>,
    roles: Arc<Roles>,
}

impl PartialEq for ParameterProfile {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
    }
}

impl fmt::Debug for ParameterProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ParameterProfile").field(&self.params).finish()
    }
}

fn log2_exact(x: u32) -> Option<usize> {
    (x >= 2 && x.is_power_of_two()).then(|| x.trailing_zeros() as usize)
}

fn min_entropy_for(output: usize, eps: f64, source: usize) -> usize {
    let want = output as f64 + 5.0 * (1.0 / eps).log2();
    (want.ceil() as usize).min(source)
}

impl ParameterProfile {
    pub fn new(params: ProfileParams) -> Result<Self> {
        let p = &params;
        let rule = |ok: bool, r: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::ProfileViolation { name: p.name.clone(), rule: r.to_string() })
            }
        };
        rule(p.n > 0 && p.delta_n > 0 && p.delta_n < p.n, "0 < delta_n < n")?;
        rule(2 * p.delta_n < p.n, "out_len = (1/2 - delta) n is positive")?;
        rule(p.n + p.delta_n <= 64, "n + delta_n <= 64")?;
        let log_q = log2_exact(p.q);
        rule(log_q.is_some(), "q is a power of two")?;
        let log_q = log_q.unwrap();
        let log_v = log2_exact(p.v);
        rule(log_v.is_some(), "v is a power of two")?;
        let log_v = log_v.unwrap();
        rule(p.k > 0, "k > 0")?;
        rule(3 * p.k <= p.delta_n, "3k <= delta n")?;
        rule(3 * p.k.pow(3) <= p.delta_n, "3k^3 <= delta n")?;
        rule((3 * p.k).is_multiple_of(log_v), "log v divides 3k")?;
        rule(p.v <= p.q, "v <= q")?;
        rule(*p.eps.numer() > 0 && p.eps <= Ratio::from_integer(1), "0 < eps <= 1")?;
        // v = ceil(n / (eps log q))
        let v_exact = Ratio::new(p.n as u64, 1) / (p.eps * Ratio::from_integer(log_q as u64));
        rule(v_exact.ceil().to_integer() == u64::from(p.v), "v = ceil(n / (eps log q))")?;
        let d = p.n.div_ceil(log_q);
        rule(d <= p.v as usize, "ECC message symbols <= v")?;
        rule(p.h == 10 * p.s, "h = 10 s")?;
        rule(p.s <= p.h && p.b > 0 && p.s > 0, "s, b positive")?;
        rule(p.b <= p.delta_n, "b <= delta n")?;
        rule(p.h <= p.n, "h <= n")?;
        rule(p.h <= 16, "h <= 16")?;
        rule(p.advcb_out > 0 && p.advcb_out <= p.delta_n, "n^delta2 <= delta n")?;
        rule(*p.eps_prime.numer() > 0 && p.eps_prime < Ratio::from_integer(1), "0 < eps' < 1")?;
        rule(2 * p.mac_tag <= (p.n - 2 * p.delta_n) / 2, "2 t <= out_len")?;

        let out_len = (p.n - 2 * p.delta_n) / 2;
        let ep = *p.eps_prime.numer() as f64 / *p.eps_prime.denom() as f64;
        let e = *p.eps.numer() as f64 / *p.eps.denom() as f64;
        let ext = |src: usize, seed: usize, out: usize, err: f64| {
            Toeplitz::affine(&SeededExtractorSpec::hashed(src, seed, out, min_entropy_for(out, err, src)))
        };
        let roles = Roles {
            ext1: ext(p.delta_n, p.s, p.b, ep)?,
            ext2: ext(p.h, p.b, p.s, ep)?,
            ext3: ext(p.n, p.b, p.h, ep)?,
            ext4: ext(p.delta_n, p.h, p.advcb_out, e * e)?,
            ext6: ext(p.n, p.advcb_out, out_len, e * e)?,
            ip1: IpSpec::new(FieldDescriptor::binary(log_v as u32)?, 3 * p.k / log_v)?,
            ip2: IpSpec::new(FieldDescriptor::binary(p.h as u32)?, (3 * p.k.pow(3)).div_ceil(p.h))?,
            ecc: EccParams::new(FieldDescriptor::binary(log_q as u32)?, d, p.v as usize)?,
        };
        Ok(Self { params: Arc::new(params), roles: Arc::new(roles) })
    }

    pub fn params(&self) -> &ProfileParams {
        &self.params
    }

    pub fn roles(&self) -> &Roles {
        &self.roles
    }

    pub fn name(&self) -> &str {
        &self.params.name
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    /// Length of the second source, `delta * n`.
    pub fn y_len(&self) -> usize {
        self.params.delta_n
    }

    pub fn delta(&self) -> Ratio<u64> {
        Ratio::new(self.params.delta_n as u64, self.params.n as u64)
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn log_q(&self) -> usize {
        self.params.q.trailing_zeros() as usize
    }

    pub fn log_v(&self) -> usize {
        self.params.v.trailing_zeros() as usize
    }

    /// Advice length `a = 6k + 2 log q`.
    pub fn a(&self) -> usize {
        6 * self.params.k + 2 * self.log_q()
    }

    pub fn s(&self) -> usize {
        self.params.s
    }

    pub fn b(&self) -> usize {
        self.params.b
    }

    pub fn h(&self) -> usize {
        self.params.h
    }

    /// Output length of the correlation breaker, `n^delta2`.
    pub fn advcb_out(&self) -> usize {
        self.params.advcb_out
    }

    /// `floor((1/2 - delta) n)`.
    pub fn out_len(&self) -> usize {
        (self.params.n - 2 * self.params.delta_n) / 2
    }

    /// Bits of encoder randomness, `n + delta n`.
    pub fn randomness_len(&self) -> usize {
        self.params.n + self.params.delta_n
    }

    pub fn mac_tag(&self) -> usize {
        self.params.mac_tag
    }

    /// `delta2` with `n^delta2 = advcb_out`.
    pub fn delta2(&self) -> f64 {
        (self.params.advcb_out as f64).ln() / (self.params.n as f64).ln()
    }

    /// `delta1` with `eps = 2^(-n^delta1)`; not finite when `eps = 1`.
    pub fn delta1(&self) -> f64 {
        let e = *self.params.eps.numer() as f64 / *self.params.eps.denom() as f64;
        (-e.log2()).ln() / (self.params.n as f64).ln()
    }

    /// Exact rate of the randomness encoder, `out_len / (n + delta n)`.
    pub fn nmre_rate(&self) -> Ratio<u64> {
        Ratio::new(self.out_len() as u64, self.randomness_len() as u64)
    }
}

/// Parses a registry: `[NAME]` headers followed by `key = value` lines.
pub fn parse_registry(text: &str) -> Result<Vec<ParameterProfile>> {
    let mut blocks: Vec<(String, BTreeMap<String, String>)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            blocks.push((name.trim().to_string(), BTreeMap::new()));
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
        let (_, map) = blocks
            .last_mut()
            .ok_or_else(|| Error::Parse(format!("line {}: entry before any [profile] header", lineno + 1)))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    blocks.into_iter().map(|(name, map)| ParameterProfile::new(params_from_map(name, &map)?)).collect()
}

fn params_from_map(name: String, map: &BTreeMap<String, String>) -> Result<ProfileParams> {
    let get = |key: &str| -> Result<&String> {
        map.get(key).ok_or_else(|| Error::Parse(format!("profile {name}: missing `{key}`")))
    };
    let int = |key: &str| -> Result<usize> {
        get(key)?.parse().map_err(|_| Error::Parse(format!("profile {name}: `{key}` is not an integer")))
    };
    let ratio = |key: &str| -> Result<Ratio<u64>> {
        let s = get(key)?;
        let parsed = match s.split_once('/') {
            Some((a, b)) => a.trim().parse().ok().zip(b.trim().parse().ok()),
            None => s.parse().ok().map(|a| (a, 1)),
        };
        match parsed {
            Some((a, b)) if b != 0 => Ok(Ratio::new(a, b)),
            _ => Err(Error::Parse(format!("profile {name}: `{key}` is not a rational"))),
        }
    };
    Ok(ProfileParams {
        n: int("n")?,
        delta_n: int("delta_n")?,
        k: int("k")?,
        q: int("q")? as u32,
        v: int("v")? as u32,
        eps: ratio("eps")?,
        eps_prime: ratio("eps_prime")?,
        s: int("s")?,
        b: int("b")?,
        h: int("h")?,
        advcb_out: int("advcb_out")?,
        mac_tag: int("mac_tag")?,
        name,
    })
}

/// Named profiles available to the library and CLI.
#[derive(Clone, Debug)]
pub struct Registry {
    profiles: Vec<ParameterProfile>,
}

impl Registry {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self { profiles: parse_registry(text)? })
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN_REGISTRY).expect("bundled registry is valid")
    }

    pub fn from_dir(dir: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(dir.join("profiles.txt"))?)
    }

    /// The registry named by the environment override, else the built-in one.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(PROFILE_DIR_ENV) {
            Some(dir) => Self::from_dir(Path::new(&dir)),
            None => Ok(Self::builtin()),
        }
    }

    pub fn get(&self, name: &str) -> Result<ParameterProfile> {
        self.profiles
            .iter()
            .find(|p| p.name() == name)
            .cloned()
            .ok_or_else(|| Error::UnknownProfile(name.to_string()))
    }

    pub fn profiles(&self) -> &[ParameterProfile] {
        &self.profiles
    }
}

/// Looks up a profile in the built-in registry.
pub fn profile(name: &str) -> Result<ParameterProfile> {
    Registry::builtin().get(name)
}
