use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Largest register handled by the dense Pauli routines.
pub const MAX_PAULI_QUBITS: usize = 3;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `i^phase * X^x Z^z` on `qubits` qubits. Qubit 0 is the leftmost tensor
/// factor and corresponds to mask bit `qubits - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliOp {
    qubits: usize,
    x: u32,
    z: u32,
    phase: u8,
}

impl PauliOp {
    pub fn new(qubits: usize, x: u32, z: u32, phase: u8) -> Result<Self> {
        if qubits == 0 || qubits > MAX_PAULI_QUBITS {
            return Err(Error::Unsupported(format!("{qubits}-qubit Pauli operators")));
        }
        if x >> qubits != 0 || z >> qubits != 0 {
            return Err(Error::InvalidParameters(format!("Pauli masks ({x:b}, {z:b}) exceed {qubits} qubits")));
        }
        Ok(Self { qubits, x, z, phase: phase % 4 })
    }

    pub fn identity(qubits: usize) -> Result<Self> {
        Self::new(qubits, 0, 0, 0)
    }

    /// Hermitian Pauli from a word over `I`, `X`, `Y`, `Z`, leftmost qubit first.
    pub fn from_label(label: &str) -> Result<Self> {
        let (mut x, mut z, mut ys) = (0u32, 0u32, 0u8);
        for c in label.chars() {
            x <<= 1;
            z <<= 1;
            match c.to_ascii_uppercase() {
                'I' => {}
                'X' => x |= 1,
                'Z' => z |= 1,
                'Y' => {
                    x |= 1;
                    z |= 1;
                    ys += 1;
                }
                _ => return Err(Error::Parse(format!("bad Pauli letter {c:?}"))),
            }
        }
        // Y = i X Z
        Self::new(label.chars().count(), x, z, ys % 4)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn x_mask(&self) -> u32 {
        self.x
    }

    pub fn z_mask(&self) -> u32 {
        self.z
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    /// Symplectic label `(x << qubits) | z`, ignoring phase.
    pub fn symplectic_index(&self) -> u32 {
        (self.x << self.qubits) | self.z
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Equal as operators modulo a global phase.
    pub fn same_up_to_phase(&self, other: &Self) -> bool {
        self.qubits == other.qubits && self.x == other.x && self.z == other.z
    }

    /// `self * other` with the exact phase.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.qubits != other.qubits {
            return Err(Error::LengthMismatch { expected: self.qubits, actual: other.qubits });
        }
        // Z^z X^x' = (-1)^{z.x'} X^x' Z^z
        let sign = (self.z & other.x).count_ones() % 2;
        Self::new(self.qubits, self.x ^ other.x, self.z ^ other.z, self.phase + other.phase + 2 * sign as u8)
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    pub fn matrix(&self) -> CMatrix {
        pauli_matrix(self)
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut ys = 0u8;
        let mut word = String::new();
        for q in 0..self.qubits {
            let bit = self.qubits - 1 - q;
            let (x, z) = ((self.x >> bit) & 1, (self.z >> bit) & 1);
            word.push(match (x, z) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => {
                    ys += 1;
                    'Y'
                }
            });
        }
        let rel = (self.phase + 4 - ys % 4) % 4;
        let prefix = ["", "i", "-", "-i"][rel as usize];
        write!(f, "{prefix}{word}")
    }
}

impl std::str::FromStr for PauliOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, word) = if let Some(w) = s.strip_prefix("-i") {
            (2u8 + 1, w)
        } else if let Some(w) = s.strip_prefix('-') {
            (2, w)
        } else if let Some(w) = s.strip_prefix('i') {
            (1, w)
        } else {
            (0, s.strip_prefix('+').unwrap_or(s))
        };
        let p = Self::from_label(word)?;
        Self::new(p.qubits, p.x, p.z, p.phase + phase)
    }
}

fn single(x: bool, z: bool) -> CMatrix {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    match (x, z) {
        (false, false) => CMatrix::from_row_slice(2, 2, &[one, zero, zero, one]),
        (true, false) => CMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
        (false, true) => CMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]),
        // X Z
        (true, true) => CMatrix::from_row_slice(2, 2, &[zero, -one, one, zero]),
    }
}

pub fn pauli_matrix(p: &PauliOp) -> CMatrix {
    let mut m = CMatrix::from_element(1, 1, I.powu(u32::from(p.phase)));
    for q in 0..p.qubits {
        let bit = p.qubits - 1 - q;
        m = m.kronecker(&single((p.x >> bit) & 1 == 1, (p.z >> bit) & 1 == 1));
    }
    m
}

/// The `4^m` Hermitian Paulis, identity first, ordered by symplectic index.
pub fn all_paulis(qubits: usize) -> Result<Vec<PauliOp>> {
    (0..1u32 << (2 * qubits))
        .map(|idx| {
            let (x, z) = (idx >> qubits, idx & ((1 << qubits) - 1));
            let ys = (x & z).count_ones() as u8;
            PauliOp::new(qubits, x, z, ys)
        })
        .collect()
}
