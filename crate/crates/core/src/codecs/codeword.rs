use std::fmt;
use std::str::FromStr;

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Serialized form of the rejection symbol.
pub const BOT_TOKEN: &str = "BOT";

/// Three-part codeword `(X, Y, Z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Codeword3 {
    pub x: BitString,
    pub y: BitString,
    pub z: BitString,
}

/// Two-part codeword `(X, Y || Z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Codeword2 {
    pub x: BitString,
    pub yz: BitString,
}

fn write_parts(f: &mut fmt::Formatter<'_>, parts: &[&BitString]) -> fmt::Result {
    write!(f, "{}", parts.len())?;
    for p in parts {
        write!(f, ":{}", p.to_hex())?;
    }
    Ok(())
}

/// Parses `count:len:hex:len:hex...`, tolerating whitespace around separators.
pub(crate) fn parse_parts(s: &str) -> Result<Vec<BitString>> {
    let tokens: Vec<&str> = s.trim().split(':').map(str::trim).collect();
    let count: usize = tokens[0]
        .parse()
        .map_err(|_| Error::MalformedHex(format!("bad split count {:?}", tokens[0])))?;
    if tokens.len() != 1 + 2 * count {
        return Err(Error::MalformedHex(format!("expected {count} parts in {s:?}")));
    }
    tokens[1..]
        .chunks(2)
        .map(|c| BitString::from_hex(&format!("{}:{}", c[0], c[1])))
        .collect()
}

impl fmt::Display for Codeword3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_parts(f, &[&self.x, &self.y, &self.z])
    }
}

impl fmt::Display for Codeword2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_parts(f, &[&self.x, &self.yz])
    }
}

impl FromStr for Codeword3 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts = parse_parts(s)?;
        match <[BitString; 3]>::try_from(parts) {
            Ok([x, y, z]) => Ok(Self { x, y, z }),
            Err(_) => Err(Error::MalformedHex("a 3-split codeword needs 3 parts".into())),
        }
    }
}

impl FromStr for Codeword2 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts = parse_parts(s)?;
        match <[BitString; 2]>::try_from(parts) {
            Ok([x, yz]) => Ok(Self { x, yz }),
            Err(_) => Err(Error::MalformedHex("a 2-split codeword needs 2 parts".into())),
        }
    }
}

/// Decoder output as text: the message in length-prefixed hex, or `BOT`.
pub fn format_decoded(m: &Option<BitString>) -> String {
    match m {
        Some(b) => b.to_hex(),
        None => BOT_TOKEN.to_string(),
    }
}

pub fn parse_decoded(s: &str) -> Result<Option<BitString>> {
    let s = s.trim();
    if s == BOT_TOKEN {
        Ok(None)
    } else {
        BitString::from_hex(s).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let c = Codeword3 {
            x: BitString::from_binary_str("10110011100101").unwrap(),
            y: BitString::from_binary_str("101").unwrap(),
            z: BitString::new(),
        };
        let s = c.to_string();
        assert_eq!(s, "3:14:b394:3:a:0:");
        assert_eq!(s.parse::<Codeword3>().unwrap(), c);
        assert_eq!(" 3 : 14:b394 : 3:a : 0: ".parse::<Codeword3>().unwrap(), c);
        assert!(s.parse::<Codeword2>().is_err());
        let d = Codeword2 { x: c.x.clone(), yz: c.y.clone() };
        assert_eq!(d.to_string().parse::<Codeword2>().unwrap(), d);
        assert!("2:3:a".parse::<Codeword2>().is_err());
    }

    #[test]
    fn decoded_tokens() {
        assert_eq!(format_decoded(&None), "BOT");
        assert_eq!(parse_decoded("BOT").unwrap(), None);
        let m = Some(BitString::from_binary_str("01").unwrap());
        assert_eq!(parse_decoded(&format_decoded(&m)).unwrap(), m);
    }
}
