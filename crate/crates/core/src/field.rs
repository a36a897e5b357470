//! Finite-field arithmetic over GF(p^m) for fields of at most 2^16 elements.
//!
//! An element is stored as its canonical index: the base-`p` digits of the
//! index are the polynomial coefficients, least significant digit first. For
//! binary fields this means bit `i` of the index is the coefficient of `x^i`.
//! Bit-string packing is big-endian, so the first bit of a symbol is the
//! coefficient of the highest power.

use std::fmt;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::bits::BitString;
use crate::error::{Error, Result};

const MAX_ORDER: u64 = 1 << 16;
const TABLE_ORDER: u32 = 256;

#[derive(Clone)]
pub struct FieldDescriptor {
    inner: Arc<FieldInner>,
}

struct FieldInner {
    p: u32,
    degree: u32,
    /// Monic reduction polynomial, coefficients low to high (`degree + 1` entries).
    modulus: Vec<u32>,
    order: u32,
    tables: Option<Tables>,
}

struct Tables {
    mul: Vec<u16>,
    inv: Vec<u16>,
}

impl PartialEq for FieldDescriptor {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus)
    }
}
impl Eq for FieldDescriptor {}

impl fmt::Debug for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.inner.p, self.inner.degree, self.inner.modulus)
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

// --- polynomial helpers over GF(p), coefficients low to high -------------

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    // p is small, Fermat is fine
    let mut result = 1u64;
    let mut base = u64::from(a % p);
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % u64::from(p);
        }
        base = base * base % u64::from(p);
        e >>= 1;
    }
    result as u32
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let m = trim(m.to_vec());
    let mut r = trim(a.to_vec());
    let lead_inv = inv_mod_p(*m.last().unwrap(), p);
    while r.len() >= m.len() {
        let shift = r.len() - m.len();
        let factor = r.last().unwrap() * lead_inv % p;
        for (i, &c) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - (factor * c) % p) % p;
        }
        r = trim(r);
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

fn poly_divmod(a: &[u32], m: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
    let m = trim(m.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < m.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![0u32; r.len() - m.len() + 1];
    let lead_inv = inv_mod_p(*m.last().unwrap(), p);
    while r.len() >= m.len() {
        let shift = r.len() - m.len();
        let factor = r.last().unwrap() * lead_inv % p;
        q[shift] = factor;
        for (i, &c) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - (factor * c) % p) % p;
        }
        r = trim(r);
    }
    (trim(q), r)
}

fn digits(mut v: u32, p: u32, n: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(n as usize);
    for _ in 0..n {
        d.push(v % p);
        v /= p;
    }
    d
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// True when the monic polynomial `modulus` (low to high) has no factor of
/// degree between 1 and `deg/2`. Exhaustive over candidate divisors.
pub fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let m = trim(modulus.to_vec());
    if m.len() < 2 {
        return false;
    }
    let degree = (m.len() - 1) as u32;
    for d in 1..=degree / 2 {
        let count = p.pow(d);
        for low in 0..count {
            let mut cand = digits(low, p, d);
            cand.push(1);
            if poly_rem(&m, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The first monic irreducible polynomial of the given degree, scanning the
/// lower coefficients in canonical index order.
pub fn default_modulus(p: u32, degree: u32) -> Vec<u32> {
    let count = p.pow(degree);
    for low in 0..count {
        let mut cand = digits(low, p, degree);
        cand.push(1);
        if is_irreducible(&cand, p) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldDescriptor {
    /// GF(p^degree) with the given reduction polynomial, or the default one.
    pub fn new(p: u32, degree: u32, modulus: Option<Vec<u32>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("characteristic {p} is not prime")));
        }
        if degree == 0 {
            return Err(Error::InvalidField("extension degree must be positive".into()));
        }
        let order = u64::from(p).checked_pow(degree).unwrap_or(u64::MAX);
        if order > MAX_ORDER {
            return Err(Error::InvalidField(format!("{p}^{degree} exceeds 2^16 elements")));
        }
        let modulus = match modulus {
            Some(m) => {
                if m.len() != degree as usize + 1 || m[degree as usize] != 1 {
                    return Err(Error::InvalidField("modulus must be monic of the stated degree".into()));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidField("modulus coefficient out of range".into()));
                }
                if !is_irreducible(&m, p) {
                    return Err(Error::InvalidField(format!("{m:?} is reducible over GF({p})")));
                }
                m
            }
            None => default_modulus(p, degree),
        };
        let mut inner = FieldInner { p, degree, modulus, order: order as u32, tables: None };
        if inner.order <= TABLE_ORDER {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(Self { inner: Arc::new(inner) })
    }

    /// GF(2^w) with the default reduction polynomial. Descriptors are cached,
    /// so repeated calls share tables.
    pub fn binary(w: u32) -> Result<Self> {
        static CACHE: OnceLock<Mutex<HashMap<u32, FieldDescriptor>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(f) = cache.lock().expect("field cache poisoned").get(&w) {
            return Ok(f.clone());
        }
        let f = Self::new(2, w, None)?;
        cache.lock().expect("field cache poisoned").insert(w, f.clone());
        Ok(f)
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.degree
    }

    pub fn order(&self) -> u32 {
        self.inner.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    /// Bits per packed element; only binary fields pack into bit strings.
    pub fn bits_per_element(&self) -> Option<usize> {
        (self.inner.p == 2).then_some(self.inner.degree as usize)
    }

    pub fn contains(&self, v: u32) -> bool {
        v < self.inner.order
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let p = self.inner.p;
        if p == 2 {
            return a ^ b;
        }
        let (da, db) = (digits(a, p, self.inner.degree), digits(b, p, self.inner.degree));
        let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
        undigits(&sum, p)
    }

    pub fn neg(&self, a: u32) -> u32 {
        let p = self.inner.p;
        if p == 2 {
            return a;
        }
        let d: Vec<u32> = digits(a, p, self.inner.degree).iter().map(|&c| (p - c) % p).collect();
        undigits(&d, p)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let inner = &*self.inner;
        if let Some(t) = &inner.tables {
            return u32::from(t.mul[(a * inner.order + b) as usize]);
        }
        mul_slow(inner, a, b)
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::InverseOfZero);
        }
        let inner = &*self.inner;
        if let Some(t) = &inner.tables {
            return Ok(u32::from(t.inv[a as usize]));
        }
        Ok(inv_euclid(inner, a))
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut result = 1;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    pub fn elem(&self, value: u32) -> Result<FieldElem> {
        if !self.contains(value) {
            return Err(Error::InvalidField(format!("{value} is not an element of {self:?}")));
        }
        Ok(FieldElem { field: self.clone(), value })
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { field: self.clone(), value: 0 }
    }

    pub fn one(&self) -> FieldElem {
        FieldElem { field: self.clone(), value: 1 }
    }

    /// All elements in canonical enumeration order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.inner.order).map(move |v| FieldElem { field: self.clone(), value: v })
    }

    /// Absolute trace to GF(p), as an element of the prime field.
    pub fn trace(&self, a: u32) -> u32 {
        let mut acc = 0;
        let mut cur = a;
        for _ in 0..self.inner.degree {
            acc = self.add(acc, cur);
            cur = self.pow(cur, u64::from(self.inner.p));
        }
        acc
    }
}

fn mul_slow(inner: &FieldInner, a: u32, b: u32) -> u32 {
    if inner.p == 2 {
        let mut acc: u64 = 0;
        for i in 0..inner.degree {
            if (b >> i) & 1 == 1 {
                acc ^= u64::from(a) << i;
            }
        }
        let deg = inner.degree;
        let modbits = undigits(&inner.modulus, 2) as u64;
        for i in (deg..2 * deg).rev() {
            if (acc >> i) & 1 == 1 {
                acc ^= modbits << (i - deg);
            }
        }
        return acc as u32;
    }
    let p = inner.p;
    let prod = poly_mul(
        &trim(digits(a, p, inner.degree)),
        &trim(digits(b, p, inner.degree)),
        p,
    );
    let mut r = poly_rem(&prod, &inner.modulus, p);
    r.resize(inner.degree as usize, 0);
    undigits(&r, p)
}

fn inv_euclid(inner: &FieldInner, a: u32) -> u32 {
    let p = inner.p;
    // invariant: s * a == r (mod modulus)
    let (mut r0, mut r1) = (inner.modulus.clone(), trim(digits(a, p, inner.degree)));
    let (mut s0, mut s1): (Vec<u32>, Vec<u32>) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = poly_divmod(&r0, &r1, p);
        let s = poly_sub(&s0, &poly_mul(&q, &s1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    // r0 is a nonzero constant
    let c_inv = inv_mod_p(r0[0], p);
    let mut out: Vec<u32> = s0.iter().map(|&c| c * c_inv % p).collect();
    out = poly_rem(&out, &inner.modulus, p);
    out.resize(inner.degree as usize, 0);
    undigits(&out, p)
}

fn build_tables(inner: &FieldInner) -> Tables {
    let q = inner.order;
    let mut mul = vec![0u16; (q * q) as usize];
    for a in 0..q {
        for b in a..q {
            let v = mul_slow(inner, a, b) as u16;
            mul[(a * q + b) as usize] = v;
            mul[(b * q + a) as usize] = v;
        }
    }
    let mut inv = vec![0u16; q as usize];
    for a in 1..q {
        for b in 1..q {
            if mul[(a * q + b) as usize] == 1 {
                inv[a as usize] = b as u16;
                break;
            }
        }
    }
    Tables { mul, inv }
}

/// An element together with its field.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElem {
    field: FieldDescriptor,
    value: u32,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl FieldElem {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &FieldElem) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }
}

pub fn field_add(a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
    a.check(b)?;
    Ok(FieldElem { field: a.field.clone(), value: a.field.add(a.value, b.value) })
}

pub fn field_mul(a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
    a.check(b)?;
    Ok(FieldElem { field: a.field.clone(), value: a.field.mul(a.value, b.value) })
}

pub fn field_inv(a: &FieldElem) -> Result<FieldElem> {
    Ok(FieldElem { field: a.field.clone(), value: a.field.inv(a.value)? })
}

/// Packs a bit string into consecutive field elements, big-endian per element.
pub fn bits_to_field_vec(x: &BitString, desc: &FieldDescriptor) -> Result<Vec<FieldElem>> {
    Ok(bits_to_values(x, desc)?
        .into_iter()
        .map(|value| FieldElem { field: desc.clone(), value })
        .collect())
}

pub(crate) fn bits_to_values(x: &BitString, desc: &FieldDescriptor) -> Result<Vec<u32>> {
    let w = desc
        .bits_per_element()
        .ok_or_else(|| Error::Unsupported("bit packing needs a binary field".into()))?;
    if !x.len().is_multiple_of(w) {
        return Err(Error::LengthMismatch { expected: x.len().div_ceil(w) * w, actual: x.len() });
    }
    Ok((0..x.len() / w)
        .map(|k| (0..w).fold(0u32, |acc, j| (acc << 1) | u32::from(x.get(k * w + j))))
        .collect())
}

pub fn field_vec_to_bits(v: &[FieldElem]) -> Result<BitString> {
    let Some(first) = v.first() else {
        return Ok(BitString::new());
    };
    let desc = first.field.clone();
    if v.iter().any(|e| e.field != desc) {
        return Err(Error::FieldMismatch);
    }
    let vals: Vec<u32> = v.iter().map(|e| e.value).collect();
    values_to_bits(&vals, &desc)
}

pub(crate) fn values_to_bits(vals: &[u32], desc: &FieldDescriptor) -> Result<BitString> {
    let w = desc
        .bits_per_element()
        .ok_or_else(|| Error::Unsupported("bit packing needs a binary field".into()))?;
    Ok(BitString::concat_all(
        vals.iter().map(|&v| BitString::from_u64(u64::from(v), w)).collect::<Vec<_>>().iter(),
    ))
}
