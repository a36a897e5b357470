use std::sync::Arc;

use num_complex::Complex64;

use super::clifford::{sc_enumerate, sc_order, sc_sample_index};
use super::pauli::{CMatrix, PauliOp};
use super::state::{fidelity_pure, trace_norm_distance, CVector, DenseState, Part};
use super::twirl::{marginal_times_uniform, mixed_pauli_channel};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::nmext::{NmExtractor, ParameterProfile, Pipeline, MAX_TABLE_BITS};

/// Three-split code for quantum messages: the message register is scrambled
/// by the subgroup element indexed by `2nmExt(x, y)`; `x` and `y` travel in
/// the clear.
#[derive(Clone, Debug)]
pub struct Qnmc {
    ext: Arc<NmExtractor>,
    qubits: usize,
}

/// Encoded state plus the two classical shares.
#[derive(Clone, Debug, PartialEq)]
pub struct QnmcCodeword {
    pub z: DenseState,
    pub x: BitString,
    pub y: BitString,
}

impl Qnmc {
    pub fn new(profile: ParameterProfile, pipeline: Pipeline) -> Result<Self> {
        Self::from_extractor(Arc::new(NmExtractor::new(profile, pipeline)))
    }

    /// Requires an extractor output of exactly `5m` bits with `m <= 2`.
    pub fn from_extractor(ext: Arc<NmExtractor>) -> Result<Self> {
        let out = ext.profile().out_len();
        if !out.is_multiple_of(5) || !(1..=2).contains(&(out / 5)) {
            return Err(Error::Incompatible {
                scheme: "qnmc".into(),
                what: format!("profile {} extracts {out} bits, the quantum code needs 5 or 10", ext.profile().name()),
            });
        }
        Ok(Self { qubits: out / 5, ext })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn profile(&self) -> &ParameterProfile {
        self.ext.profile()
    }

    fn message_qubits_of(&self, state: &DenseState) -> Result<()> {
        match state.parts().last() {
            Some((Part::Message, q)) if *q == self.qubits => Ok(()),
            _ => Err(Error::InvalidParameters(format!("state must end with a {}-qubit message register", self.qubits))),
        }
    }

    fn apply_on_message(state: &DenseState, u: &CMatrix) -> Result<DenseState> {
        let left = state.qubits() - u.nrows().trailing_zeros() as usize;
        let full = CMatrix::identity(1 << left, 1 << left).kronecker(u);
        let v: CVector = full * state.amplitudes();
        DenseState::new(v, state.parts().to_vec())
    }

    fn key(&self, x: &BitString, y: &BitString) -> Result<u64> {
        Ok(self.ext.eval(x, y)?.to_u64())
    }

    pub fn encode(&self, message: &DenseState, randomness: &BitString) -> Result<QnmcCodeword> {
        self.message_qubits_of(message)?;
        let p = self.profile();
        if randomness.len() != p.randomness_len() {
            return Err(Error::LengthMismatch { expected: p.randomness_len(), actual: randomness.len() });
        }
        let (x, y) = randomness.split_at(p.n())?;
        let c = sc_sample_index(self.key(&x, &y)?, self.qubits)?;
        Ok(QnmcCodeword { z: Self::apply_on_message(message, c.matrix())?, x, y })
    }

    pub fn decode(&self, word: &QnmcCodeword) -> Result<DenseState> {
        self.message_qubits_of(&word.z)?;
        let c = sc_sample_index(self.key(&word.x, &word.y)?, self.qubits)?;
        Self::apply_on_message(&word.z, &c.adjoint_matrix())
    }

    /// Number of randomness strings selecting each subgroup element.
    pub fn element_counts(&self) -> Result<Vec<u64>> {
        let bits = self.profile().randomness_len();
        if bits > MAX_TABLE_BITS {
            return Err(Error::SpaceTooLarge { bits, limit: MAX_TABLE_BITS });
        }
        let k = sc_order(self.qubits) as u64;
        let mut counts = vec![0u64; k as usize];
        for &r in self.ext.table()? {
            counts[(u64::from(r) % k) as usize] += 1;
        }
        Ok(counts)
    }

    /// Distance from uniform of the subgroup element induced by uniform randomness.
    pub fn element_bias(&self) -> Result<f64> {
        let counts = self.element_counts()?;
        let total: u64 = counts.iter().sum();
        let u = 1.0 / counts.len() as f64;
        Ok(0.5 * counts.iter().map(|&c| (c as f64 / total as f64 - u).abs()).sum::<f64>())
    }

    /// Smallest fidelity of `Dec(Enc(state, r))` with `state` over every `r`.
    pub fn min_roundtrip_fidelity(&self, state: &DenseState) -> Result<f64> {
        self.message_qubits_of(state)?;
        let counts = self.element_counts()?;
        let group = sc_enumerate(self.qubits)?;
        let mut worst = f64::INFINITY;
        for (c, &n) in group.iter().zip(&counts) {
            if n == 0 {
                continue;
            }
            let z = Self::apply_on_message(state, c.matrix())?;
            let back = Self::apply_on_message(&z, &c.adjoint_matrix())?;
            worst = worst.min(fidelity_pure(state, back.density().matrix()));
        }
        Ok(worst)
    }

    /// Averages `C^dag Phi(C psi C^dag) C` over the subgroup element drawn from
    /// all randomness strings, with `Phi` given by Kraus operators on the
    /// message register and the classical shares left intact.
    pub fn tamper_experiment(&self, state: &DenseState, kraus: &[CMatrix]) -> Result<QuantumTamperReport> {
        self.message_qubits_of(state)?;
        let dim = 1usize << self.qubits;
        if kraus.is_empty() || kraus.iter().any(|k| k.nrows() != dim || k.ncols() != dim) {
            return Err(Error::InvalidParameters(format!("Kraus operators must be {dim}x{dim}")));
        }
        let completeness: CMatrix = kraus.iter().map(|k| k.adjoint() * k).sum();
        if (completeness - CMatrix::identity(dim, dim)).norm() > 1e-10 {
            return Err(Error::InvalidParameters("Kraus operators are not trace preserving".into()));
        }
        let counts = self.element_counts()?;
        let total: u64 = counts.iter().sum();
        let group = sc_enumerate(self.qubits)?;
        let left = state.qubits() - self.qubits;
        let lift = |m: &CMatrix| CMatrix::identity(1 << left, 1 << left).kronecker(m);
        let psi = state.density().into_matrix();
        let mut out = CMatrix::zeros(psi.nrows(), psi.ncols());
        for (c, &n) in group.iter().zip(&counts) {
            if n == 0 {
                continue;
            }
            let w = Complex64::new(n as f64 / total as f64, 0.0);
            let (cl, cr) = (lift(c.matrix()), lift(&c.adjoint_matrix()));
            let encoded = &cl * &psi * &cr;
            let tampered: CMatrix = kraus.iter().map(|k| lift(k) * &encoded * lift(&k.adjoint())).sum();
            out += (&cr * tampered * &cl) * w;
        }
        let p = identity_weight(kraus);
        let closed = if left == self.qubits {
            Some(&psi * Complex64::new(p, 0.0) + mixed_pauli_channel(&psi, self.qubits) * Complex64::new(1.0 - p, 0.0))
        } else {
            None
        };
        let (distance, approx_distance) = match &closed {
            Some(cf) => {
                let approx = &psi * Complex64::new(p, 0.0) + marginal_times_uniform(&psi, self.qubits) * Complex64::new(1.0 - p, 0.0);
                (trace_norm_distance(&out, cf), trace_norm_distance(&out, &approx))
            }
            None => (f64::NAN, f64::NAN),
        };
        Ok(QuantumTamperReport {
            output: out,
            p,
            closed_form: closed,
            distance,
            approx_distance,
            sampling_bias: self.element_bias()?,
        })
    }

    pub fn pauli_tamper_experiment(&self, state: &DenseState, pauli: &PauliOp) -> Result<QuantumTamperReport> {
        if pauli.qubits() != self.qubits {
            return Err(Error::LengthMismatch { expected: self.qubits, actual: pauli.qubits() });
        }
        self.tamper_experiment(state, &[pauli.matrix()])
    }
}

/// Outcome of a quantum tamper experiment on a purified message.
#[derive(Clone, Debug)]
pub struct QuantumTamperReport {
    /// Averaged state on purification and decoded message.
    pub output: CMatrix,
    /// Weight of the identity in the Pauli expansion of the channel.
    pub p: f64,
    /// `p psi + (1 - p) (4^m (psi_hat (x) U) - psi) / (4^m - 1)`.
    pub closed_form: Option<CMatrix>,
    /// Trace-norm distance of the output from the closed form.
    pub distance: f64,
    /// Trace-norm distance from `p psi + (1 - p) psi_hat (x) U`.
    pub approx_distance: f64,
    /// Distance from uniform of the drawn subgroup element.
    pub sampling_bias: f64,
}

impl QuantumTamperReport {
    /// Trace-norm slack allowed by a non-uniform element distribution.
    pub fn tolerance(&self) -> f64 {
        2.0 * self.sampling_bias + 1e-8
    }
}

/// `sum_i |tr(K_i) / d|^2`, the identity weight of the channel's Pauli expansion.
pub fn identity_weight(kraus: &[CMatrix]) -> f64 {
    kraus
        .iter()
        .map(|k| (k.trace() / Complex64::new(k.nrows() as f64, 0.0)).norm_sqr())
        .sum()
}

/// Kraus operators `(I (x) <k|) U (I (x) |e>)` of an isometry acting on the
/// message (left) and an ancilla (right) prepared in `ancilla`.
pub fn isometry_kraus(u: &CMatrix, ancilla: &CVector) -> Result<Vec<CMatrix>> {
    let e = ancilla.len();
    if !e.is_power_of_two() || e > 4 || !u.nrows().is_multiple_of(e) || u.nrows() != u.ncols() {
        return Err(Error::InvalidParameters("ancilla must be at most two qubits".into()));
    }
    let d = u.nrows() / e;
    Ok((0..e)
        .map(|k| {
            CMatrix::from_fn(d, d, |i, j| (0..e).map(|l| u[(i * e + k, j * e + l)] * ancilla[l]).sum())
        })
        .collect())
}
