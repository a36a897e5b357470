use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::pauli::CMatrix;
use crate::error::{Error, Result};

/// Largest total register for dense simulation.
pub const MAX_QUBITS: usize = 12;

const TOL: f64 = 1e-10;

pub type CVector = DVector<Complex64>;

/// Role of a group of qubits in a joint register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Purification,
    Message,
    Ancilla,
}

/// A normalized state vector; `parts` lists qubit groups from the leftmost
/// tensor factor.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    amplitudes: CVector,
    parts: Vec<(Part, usize)>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    parts: Vec<(Part, usize)>,
    amplitudes: Vec<(f64, f64)>,
}

fn qubits_of(dim: usize) -> Option<usize> {
    (dim.is_power_of_two() && dim > 0).then(|| dim.trailing_zeros() as usize)
}

impl DenseState {
    pub fn new(amplitudes: CVector, parts: Vec<(Part, usize)>) -> Result<Self> {
        let total: usize = parts.iter().map(|(_, q)| q).sum();
        if total > MAX_QUBITS {
            return Err(Error::SpaceTooLarge { bits: total, limit: MAX_QUBITS });
        }
        if amplitudes.len() != 1 << total {
            return Err(Error::LengthMismatch { expected: 1 << total, actual: amplitudes.len() });
        }
        if (amplitudes.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("state norm {} is not 1", amplitudes.norm())));
        }
        Ok(Self { amplitudes, parts })
    }

    /// Computational basis state on a single message register.
    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        let mut v = CVector::zeros(1 << qubits);
        if index >= v.len() {
            return Err(Error::OutOfRange { index, len: v.len() });
        }
        v[index] = Complex64::new(1.0, 0.0);
        Self::new(v, vec![(Part::Message, qubits)])
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn parts(&self) -> &[(Part, usize)] {
        &self.parts
    }

    pub fn qubits(&self) -> usize {
        self.parts.iter().map(|(_, q)| q).sum()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix { matrix: &self.amplitudes * self.amplitudes.adjoint() }
    }

    pub fn to_json(&self) -> String {
        let j = StateJson { parts: self.parts.clone(), amplitudes: self.amplitudes.iter().map(|z| (z.re, z.im)).collect() };
        serde_json::to_string(&j).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: StateJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(CVector::from_iterator(j.amplitudes.len(), j.amplitudes.iter().map(|&(re, im)| Complex64::new(re, im))), j.parts)
    }
}

/// A density matrix; construction checks Hermiticity, unit trace and
/// positivity to within `1e-10`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || qubits_of(matrix.nrows()).is_none() {
            return Err(Error::InvalidState("density matrix must be square of power-of-two size".into()));
        }
        if (&matrix - matrix.adjoint()).norm() > TOL {
            return Err(Error::InvalidState("matrix is not Hermitian".into()));
        }
        if (matrix.trace() - Complex64::new(1.0, 0.0)).norm() > TOL {
            return Err(Error::InvalidState(format!("trace {} is not 1", matrix.trace())));
        }
        let min = hermitian_eigenvalues(&matrix).iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(Self { matrix })
    }

    pub fn maximally_mixed(qubits: usize) -> Self {
        let d = 1usize << qubits;
        Self { matrix: CMatrix::identity(d, d).map(|z| z / d as f64) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn qubits(&self) -> usize {
        qubits_of(self.matrix.nrows()).unwrap()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self { matrix: self.matrix.kronecker(&other.matrix) }
    }
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()).map(|z| z * 0.5);
    SymmetricEigen::new(h).eigenvalues.iter().cloned().collect()
}

/// `||a - b||_1`, the sum of absolute eigenvalues of the Hermitian difference.
pub fn trace_norm_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    hermitian_eigenvalues(&(a - b)).iter().map(|e| e.abs()).sum()
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

/// `<psi| rho |psi>` for a pure target.
pub fn fidelity_pure(target: &DenseState, rho: &CMatrix) -> f64 {
    let v = target.amplitudes();
    (v.adjoint() * rho * v)[(0, 0)].re
}

/// Trace over the right factor of dimension `2^right`.
pub fn partial_trace_right(m: &CMatrix, right: usize) -> CMatrix {
    let db = 1usize << right;
    let da = m.nrows() / db;
    CMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum())
}

/// Trace over the left factor of dimension `2^left`.
pub fn partial_trace_left(m: &CMatrix, left: usize) -> CMatrix {
    let da = 1usize << left;
    let db = m.nrows() / da;
    CMatrix::from_fn(db, db, |i, j| (0..da).map(|k| m[(k * db + i, k * db + j)]).sum())
}

fn sqrt_psd(m: &CMatrix) -> CMatrix {
    let eig = SymmetricEigen::new((m + m.adjoint()).map(|z| z * 0.5));
    let roots = eig.eigenvalues.map(|e| Complex64::new(e.max(0.0).sqrt(), 0.0));
    &eig.eigenvectors * CMatrix::from_diagonal(&roots) * eig.eigenvectors.adjoint()
}

/// `sum_i |i> (x) rho^{1/2} |i>` on purification (left) and message (right).
pub fn canonical_purification(rho: &DensityMatrix) -> Result<DenseState> {
    let q = rho.qubits();
    let d = 1usize << q;
    let root = sqrt_psd(rho.matrix());
    let mut v = CVector::zeros(d * d);
    for i in 0..d {
        for j in 0..d {
            v[i * d + j] = root[(j, i)];
        }
    }
    let norm = v.norm();
    DenseState::new(v / Complex64::new(norm, 0.0), vec![(Part::Purification, q), (Part::Message, q)])
}

/// True when `state` is the canonical purification of its message marginal.
pub fn is_canonical_purification(state: &DenseState) -> bool {
    let [(Part::Purification, a), (Part::Message, b)] = state.parts() else {
        return false;
    };
    if a != b {
        return false;
    }
    let marginal = partial_trace_left(state.density().matrix(), *a);
    match DensityMatrix::new(marginal).and_then(|r| canonical_purification(&r)) {
        Ok(c) => (c.amplitudes() - state.amplitudes()).norm() < 1e-8,
        Err(_) => false,
    }
}

/// Random density matrix `G G^dag / tr` from a Ginibre matrix.
pub fn random_density<R: Rng>(rng: &mut R, qubits: usize) -> DensityMatrix {
    let d = 1usize << qubits;
    let g = CMatrix::from_fn(d, d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix { matrix: m / tr }
}

pub fn random_pure<R: Rng>(rng: &mut R, qubits: usize, parts: Vec<(Part, usize)>) -> DenseState {
    let d = 1usize << qubits;
    let v = CVector::from_fn(d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = v.norm();
    DenseState { amplitudes: v / Complex64::new(n, 0.0), parts }
}

/// `(|00> + |11> + ...) / sqrt(d)` on purification and message.
pub fn maximally_entangled(qubits: usize) -> DenseState {
    canonical_purification(&DensityMatrix::maximally_mixed(qubits)).expect("valid state")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn purification_marginals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in 1..=2 {
            let rho = random_density(&mut rng, q);
            assert!(DensityMatrix::new(rho.matrix().clone()).is_ok());
            let psi = canonical_purification(&rho).unwrap();
            let joint = psi.density();
            assert!((partial_trace_left(joint.matrix(), q) - rho.matrix()).norm() < 1e-10);
            assert!(is_canonical_purification(&psi));
        }
        let bell = maximally_entangled(1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((bell.amplitudes()[0].re - s).abs() < 1e-12 && (bell.amplitudes()[3].re - s).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        let bad = CMatrix::from_diagonal(&CVector::from_vec(vec![Complex64::new(1.5, 0.0), Complex64::new(-0.5, 0.0)]));
        assert!(DensityMatrix::new(bad).is_err());
        assert!(DenseState::new(CVector::zeros(2), vec![(Part::Message, 1)]).is_err());
    }

    #[test]
    fn distances_and_json() {
        let a = DenseState::basis(1, 0).unwrap().density();
        let b = DenseState::basis(1, 1).unwrap().density();
        assert!((trace_norm_distance(a.matrix(), b.matrix()) - 2.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = random_pure(&mut rng, 2, vec![(Part::Purification, 1), (Part::Message, 1)]);
        assert_eq!(DenseState::from_json(&psi.to_json()).unwrap(), psi);
    }
}
