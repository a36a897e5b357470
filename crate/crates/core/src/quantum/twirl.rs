use num_complex::Complex64;

use super::clifford::sc_enumerate;
use super::pauli::{all_paulis, CMatrix, PauliOp};
use super::state::{is_canonical_purification, partial_trace_left, partial_trace_right, DenseState, DensityMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwirlGroup {
    Pauli,
    Sc,
}

pub fn group_unitaries(group: TwirlGroup, qubits: usize) -> Result<Vec<CMatrix>> {
    Ok(match group {
        TwirlGroup::Pauli => all_paulis(qubits)?.iter().map(PauliOp::matrix).collect(),
        TwirlGroup::Sc => sc_enumerate(qubits)?.iter().map(|c| c.matrix().clone()).collect(),
    })
}

fn check_distinct(p1: &PauliOp, p2: &PauliOp) -> Result<()> {
    if p1.same_up_to_phase(p2) {
        return Err(Error::InvalidParameters(format!("{p1} and {p2} are the same Pauli; the sum does not vanish")));
    }
    if p1.qubits() != p2.qubits() {
        return Err(Error::LengthMismatch { expected: p1.qubits(), actual: p2.qubits() });
    }
    Ok(())
}

fn embed_right(m: &CMatrix, left: usize) -> CMatrix {
    CMatrix::identity(1 << left, 1 << left).kronecker(m)
}

/// `sum_G (G^dag P1 G) rho (G^dag P2 G)^dag` over the group, unnormalized.
pub fn twirl_sum(rho: &CMatrix, p1: &PauliOp, p2: &PauliOp, group: TwirlGroup) -> Result<CMatrix> {
    let m = p1.qubits();
    let left = rho.nrows().trailing_zeros() as usize - m;
    let (a, b) = (p1.matrix(), p2.matrix());
    let mut acc = CMatrix::zeros(rho.nrows(), rho.ncols());
    for g in group_unitaries(group, m)? {
        let l = embed_right(&(g.adjoint() * &a * &g), left);
        let r = embed_right(&(g.adjoint() * &b * &g), left);
        acc += l * rho * r.adjoint();
    }
    Ok(acc)
}

/// Operator norm of [`twirl_sum`] for distinct Paulis acting on the whole of `rho`.
pub fn twirl_residual(rho: &CMatrix, p1: &PauliOp, p2: &PauliOp, group: TwirlGroup) -> Result<f64> {
    check_distinct(p1, p2)?;
    if rho.nrows() != 1 << p1.qubits() {
        return Err(Error::LengthMismatch { expected: 1 << p1.qubits(), actual: rho.nrows() });
    }
    Ok(super::state::operator_norm(&twirl_sum(rho, p1, p2, group)?))
}

/// Same residual with the Paulis acting on the message half of a purified state.
pub fn purified_twirl_residual(state: &DenseState, p1: &PauliOp, p2: &PauliOp) -> Result<f64> {
    check_distinct(p1, p2)?;
    let rho = state.density();
    Ok(super::state::operator_norm(&twirl_sum(rho.matrix(), p1, p2, TwirlGroup::Sc)?))
}

/// `(1/|G|) sum_G (G (x) I) rho_AB (G^dag (x) I)` with `A` the left `a_qubits`.
pub fn one_design_average(rho_ab: &CMatrix, a_qubits: usize, group: TwirlGroup) -> Result<CMatrix> {
    let total = rho_ab.nrows().trailing_zeros() as usize;
    if a_qubits > total || rho_ab.nrows() != 1 << total {
        return Err(Error::LengthMismatch { expected: a_qubits, actual: total });
    }
    let b = 1usize << (total - a_qubits);
    let gs = group_unitaries(group, a_qubits)?;
    let mut acc = CMatrix::zeros(rho_ab.nrows(), rho_ab.ncols());
    for g in &gs {
        let u = g.kronecker(&CMatrix::identity(b, b));
        acc += &u * rho_ab * u.adjoint();
    }
    Ok(acc / Complex64::new(gs.len() as f64, 0.0))
}

/// `U_A (x) rho_B` for the same split.
pub fn one_design_target(rho_ab: &CMatrix, a_qubits: usize) -> CMatrix {
    let rho_b = partial_trace_left(rho_ab, a_qubits);
    DensityMatrix::maximally_mixed(a_qubits).matrix().kronecker(&rho_b)
}

/// `(1/|SC|) sum_C (I (x) C^dag P C) rho (I (x) C^dag Q^dag C)` on a canonical purification.
pub fn conjugated_pauli_average(state: &DenseState, p: &PauliOp, q: &PauliOp) -> Result<CMatrix> {
    if !is_canonical_purification(state) {
        return Err(Error::InvalidState("input is not a canonical purification".into()));
    }
    let n = sc_enumerate(p.qubits())?.len() as f64;
    Ok(twirl_sum(state.density().matrix(), p, q, TwirlGroup::Sc)? / Complex64::new(n, 0.0))
}

/// `rho_Ahat (x) U_A` for a state on purification and message halves.
pub fn marginal_times_uniform(rho: &CMatrix, message_qubits: usize) -> CMatrix {
    let hat = partial_trace_right(rho, message_qubits);
    hat.kronecker(DensityMatrix::maximally_mixed(message_qubits).matrix())
}

/// The exact value of [`conjugated_pauli_average`] in each of its three cases.
pub fn conjugated_average_closed_form(state: &DenseState, p: &PauliOp, q: &PauliOp) -> CMatrix {
    let rho = state.density().into_matrix();
    let m = p.qubits();
    if !p.same_up_to_phase(q) {
        return CMatrix::zeros(rho.nrows(), rho.ncols());
    }
    // phases of P and Q enter as p_phase * conj(q_phase)
    let rel = Complex64::new(0.0, 1.0).powi(i32::from(p.phase()) - i32::from(q.phase()));
    if p.is_identity_up_to_phase() {
        return rho * rel;
    }
    mixed_pauli_channel(&rho, m) * rel
}

/// `(4^m (rho_Ahat (x) U_A) - rho) / (4^m - 1)`.
pub fn mixed_pauli_channel(rho: &CMatrix, m: usize) -> CMatrix {
    let d2 = (1usize << (2 * m)) as f64;
    (marginal_times_uniform(rho, m) * Complex64::new(d2, 0.0) - rho) / Complex64::new(d2 - 1.0, 0.0)
}
