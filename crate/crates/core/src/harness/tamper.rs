use std::fmt;

use num_traits::{One, Zero};

use super::distribution::Prob;
use crate::bits::BitString;
use crate::error::{Error, Result};

/// A deterministic map applied to one split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitFn {
    Identity,
    Constant(BitString),
    Xor(BitString),
    BitFlip(usize),
    /// Output bit `i` is input bit `perm[i]`.
    Permute(Vec<usize>),
    /// Explicit table indexed by the packed input.
    Table(Vec<u64>),
}

impl SplitFn {
    pub fn validate(&self, len: usize) -> Result<()> {
        let bad = |what: String| Err(Error::Parse(what));
        match self {
            SplitFn::Identity => Ok(()),
            SplitFn::Constant(c) | SplitFn::Xor(c) if c.len() != len => {
                bad(format!("{} bits given for a {len}-bit split", c.len()))
            }
            SplitFn::Constant(_) | SplitFn::Xor(_) => Ok(()),
            SplitFn::BitFlip(i) if *i >= len => bad(format!("bit {i} outside a {len}-bit split")),
            SplitFn::BitFlip(_) => Ok(()),
            SplitFn::Permute(p) => {
                let mut seen = vec![false; len];
                if p.len() != len || p.iter().any(|&i| i >= len || std::mem::replace(&mut seen[i], true)) {
                    return bad(format!("{p:?} is not a permutation of {len} positions"));
                }
                Ok(())
            }
            SplitFn::Table(t) => {
                if len > 24 || t.len() != 1usize << len || t.iter().any(|&v| v >> len != 0) {
                    return bad(format!("table is not total on {len}-bit inputs"));
                }
                Ok(())
            }
        }
    }

    /// Applies the map to a packed `len`-bit value.
    pub fn apply(&self, v: u64, len: usize) -> u64 {
        match self {
            SplitFn::Identity => v,
            SplitFn::Constant(c) => c.to_u64(),
            SplitFn::Xor(c) => v ^ c.to_u64(),
            SplitFn::BitFlip(i) => v ^ (1u64 << (len - 1 - i)),
            SplitFn::Permute(p) => p.iter().fold(0u64, |acc, &src| (acc << 1) | ((v >> (len - 1 - src)) & 1)),
            SplitFn::Table(t) => t[v as usize],
        }
    }
}

impl fmt::Display for SplitFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        match self {
            SplitFn::Identity => write!(f, "identity"),
            SplitFn::Constant(c) => write!(f, "constant:{}", c.to_hex()),
            SplitFn::Xor(c) => write!(f, "xor:{}", c.to_hex()),
            SplitFn::BitFlip(i) => write!(f, "bitflip:{i}"),
            SplitFn::Permute(p) => write!(f, "permute:{}", list(&p.iter().map(|&i| i as u64).collect::<Vec<_>>())),
            SplitFn::Table(t) => write!(f, "table:{}", list(t)),
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad list entry {t:?}"))))
        .collect()
}

impl std::str::FromStr for SplitFn {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = s.split_once(':').map(|(a, b)| (a.trim(), Some(b.trim()))).unwrap_or((s, None));
        let need = || arg.ok_or_else(|| Error::Parse(format!("`{name}` needs an argument")));
        match name {
            "identity" if arg.is_none() => Ok(SplitFn::Identity),
            "constant" => Ok(SplitFn::Constant(BitString::from_hex(need()?)?)),
            "xor" => Ok(SplitFn::Xor(BitString::from_hex(need()?)?)),
            "bitflip" => need()?
                .parse()
                .map(SplitFn::BitFlip)
                .map_err(|_| Error::Parse(format!("bad bit index in {s:?}"))),
            "permute" => Ok(SplitFn::Permute(parse_list(need()?)?.into_iter().map(|i| i as usize).collect())),
            "table" => Ok(SplitFn::Table(parse_list(need()?)?)),
            _ => Err(Error::Parse(format!("unknown tamper primitive {s:?}"))),
        }
    }
}

/// Per-split tampering functions, optionally mixed over a shared random seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalTamper {
    branches: Vec<(Prob, Vec<SplitFn>)>,
}

/// Names of the splits in the text format; with two splits `y` is accepted
/// for the second one as well.
pub fn split_names(count: usize) -> &'static [&'static str] {
    match count {
        2 => &["x", "yz"],
        _ => &["x", "y", "z"],
    }
}

impl ClassicalTamper {
    pub fn new(branches: Vec<(Prob, Vec<SplitFn>)>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidParameters("tamper needs at least one branch".into()));
        }
        let total: Prob = branches.iter().map(|(w, _)| *w).sum();
        if total != Prob::one() || branches.iter().any(|(w, _)| w.is_zero()) {
            return Err(Error::InvalidParameters(format!("seed weights sum to {total}, not 1")));
        }
        let width = branches[0].1.len();
        if branches.iter().any(|(_, f)| f.len() != width) {
            return Err(Error::InvalidParameters("branches disagree on the split count".into()));
        }
        Ok(Self { branches })
    }

    /// The same functions on every seed.
    pub fn deterministic(fns: Vec<SplitFn>) -> Self {
        Self { branches: vec![(Prob::one(), fns)] }
    }

    pub fn identity(splits: usize) -> Self {
        Self::deterministic(vec![SplitFn::Identity; splits])
    }

    pub fn branches(&self) -> &[(Prob, Vec<SplitFn>)] {
        &self.branches
    }

    pub fn splits(&self) -> usize {
        self.branches[0].1.len()
    }

    pub fn validate(&self, lens: &[usize]) -> Result<()> {
        if self.splits() != lens.len() {
            return Err(Error::Parse(format!(
                "tamper has {} splits, codeword has {}",
                self.splits(),
                lens.len()
            )));
        }
        for (_, fns) in &self.branches {
            for (f, &len) in fns.iter().zip(lens) {
                f.validate(len)?;
            }
        }
        Ok(())
    }

    /// Parses the text format. A bare primitive such as `identity` applies to
    /// every split; otherwise lines read `<split> = <primitive>`, optionally in
    /// `[seed <weight>]` sections. Unlisted splits are left untouched.
    pub fn parse(text: &str, splits: usize) -> Result<Self> {
        let names = split_names(splits);
        let lines: Vec<&str> = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .collect();
        if let [single] = lines.as_slice() {
            if !single.contains('=') && !single.starts_with('[') {
                let f: SplitFn = single.parse()?;
                return Ok(Self::deterministic(vec![f; splits]));
            }
        }
        let mut branches: Vec<(Prob, Vec<SplitFn>)> = Vec::new();
        for line in lines {
            if let Some(inner) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let w = inner
                    .trim()
                    .strip_prefix("seed")
                    .ok_or_else(|| Error::Parse(format!("unknown section {line:?}")))?
                    .trim();
                let weight = match w.split_once('/') {
                    Some((a, b)) => a.trim().parse().ok().zip(b.trim().parse().ok()),
                    None => w.parse().ok().map(|a| (a, 1)),
                };
                let (a, b): (u128, u128) = weight
                    .filter(|(_, b)| *b != 0)
                    .ok_or_else(|| Error::Parse(format!("bad seed weight in {line:?}")))?;
                branches.push((Prob::new(a, b), vec![SplitFn::Identity; splits]));
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse(format!("expected `split = primitive`, got {line:?}")))?;
            let key = match (splits, key.trim()) {
                (2, "y") => "yz",
                (_, k) => k,
            };
            let idx = names
                .iter()
                .position(|n| *n == key)
                .ok_or_else(|| Error::Parse(format!("unknown split {key:?}")))?;
            if branches.is_empty() {
                branches.push((Prob::one(), vec![SplitFn::Identity; splits]));
            }
            branches.last_mut().unwrap().1[idx] = value.parse()?;
        }
        if branches.is_empty() {
            branches.push((Prob::one(), vec![SplitFn::Identity; splits]));
        }
        Self::new(branches)
    }

    /// Text form accepted by [`ClassicalTamper::parse`].
    pub fn to_text(&self) -> String {
        let names = split_names(self.splits());
        let mut out = String::new();
        let single = self.branches.len() == 1;
        for (w, fns) in &self.branches {
            if !single {
                out.push_str(&format!("[seed {w}]\n"));
            }
            for (name, f) in names.iter().zip(fns) {
                out.push_str(&format!("{name} = {f}\n"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitives() {
        let c = BitString::from_binary_str("101").unwrap();
        assert_eq!(SplitFn::Constant(c.clone()).apply(0, 3), 5);
        assert_eq!(SplitFn::Xor(c).apply(0b110, 3), 0b011);
        assert_eq!(SplitFn::BitFlip(0).apply(0, 3), 0b100);
        assert_eq!(SplitFn::Permute(vec![2, 1, 0]).apply(0b110, 3), 0b011);
        assert_eq!(SplitFn::Table(vec![1, 0]).apply(1, 1), 0);
        assert!(SplitFn::Permute(vec![0, 0, 1]).validate(3).is_err());
        assert!(SplitFn::BitFlip(3).validate(3).is_err());
        assert!(SplitFn::Table(vec![0, 2]).validate(1).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let t = ClassicalTamper::parse("x = bitflip:3\n[seed 1/3]\ny = constant:3:a\n[seed 2/3]\nz = xor:2:4\n", 3);
        assert!(t.is_err(), "entries before the first seed section belong to an implicit weight-1 branch");
        let text = "[seed 1/3]\ny = constant:3:a\n[seed 2/3]\nz = xor:2:4\nx = permute:2,1,0\n";
        let t = ClassicalTamper::parse(text, 3).unwrap();
        assert_eq!(t.branches().len(), 2);
        assert_eq!(ClassicalTamper::parse(&t.to_text(), 3).unwrap(), t);
        let id = ClassicalTamper::parse("identity", 2).unwrap();
        assert_eq!(id, ClassicalTamper::identity(2));
        assert!(ClassicalTamper::parse("w = identity", 3).is_err());
        assert!(ClassicalTamper::parse("[seed 1/2]\nx = identity", 3).is_err());
    }
}
