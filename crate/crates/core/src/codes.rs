//! Reed–Solomon evaluation codes with per-symbol access.

use num_rational::Ratio;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::field::{bits_to_values, values_to_bits, FieldDescriptor, FieldElem};

/// Message symbol `i` is the coefficient of `x^i`; codeword symbol `j` is the
/// polynomial evaluated at the field element with canonical index `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EccParams {
    field: FieldDescriptor,
    message_len: usize,
    code_len: usize,
}

impl EccParams {
    pub fn new(field: FieldDescriptor, message_len: usize, code_len: usize) -> Result<Self> {
        if message_len == 0 || message_len > code_len {
            return Err(Error::InvalidParameters(format!(
                "need 1 <= message_len ({message_len}) <= code_len ({code_len})"
            )));
        }
        if code_len as u64 > u64::from(field.order()) {
            return Err(Error::InvalidParameters(format!(
                "code_len {code_len} exceeds field size {}",
                field.order()
            )));
        }
        Ok(Self { field, message_len, code_len })
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn message_len(&self) -> usize {
        self.message_len
    }

    pub fn code_len(&self) -> usize {
        self.code_len
    }

    pub fn relative_distance(&self) -> Ratio<u64> {
        Ratio::new((self.code_len - self.message_len + 1) as u64, self.code_len as u64)
    }

    /// Bits per symbol; only binary fields are addressable as bit strings.
    pub fn symbol_bits(&self) -> Result<usize> {
        self.field
            .bits_per_element()
            .ok_or_else(|| Error::Unsupported("bit access needs a binary field".into()))
    }

    /// Capacity of the message space in bits.
    pub fn message_bits(&self) -> Result<usize> {
        Ok(self.symbol_bits()? * self.message_len)
    }
}

fn eval(field: &FieldDescriptor, coeffs: &[u32], point: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| field.add(field.mul(acc, point), c))
}

pub fn ecc_encode(msg: &[FieldElem], params: &EccParams) -> Result<Vec<FieldElem>> {
    if msg.len() != params.message_len {
        return Err(Error::LengthMismatch { expected: params.message_len, actual: msg.len() });
    }
    if msg.iter().any(|e| e.field() != &params.field) {
        return Err(Error::FieldMismatch);
    }
    let coeffs: Vec<u32> = msg.iter().map(FieldElem::value).collect();
    (0..params.code_len as u32)
        .map(|pt| params.field.elem(eval(&params.field, &coeffs, pt)))
        .collect()
}

/// Symbol `r` of the encoding of `msg`, as a `log2 q`-bit string.
///
/// `msg` may be shorter than the message capacity; it is zero-padded on the
/// right before packing into symbols.
pub fn ecc_symbol_at(msg: &BitString, r: usize, params: &EccParams) -> Result<BitString> {
    if r >= params.code_len {
        return Err(Error::OutOfRange { index: r, len: params.code_len });
    }
    let cap = params.message_bits()?;
    if msg.len() > cap {
        return Err(Error::LengthMismatch { expected: cap, actual: msg.len() });
    }
    let coeffs = bits_to_values(&msg.pad_right(cap - msg.len()), &params.field)?;
    let v = eval(&params.field, &coeffs, r as u32);
    values_to_bits(&[v], &params.field)
}
