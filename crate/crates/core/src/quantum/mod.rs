//! Dense simulation of few-qubit registers: Paulis, the transitive Clifford
//! subgroup, twirl identities and the three-split code for quantum messages.

pub mod clifford;
pub mod pauli;
pub mod qnmc;
pub mod state;
pub mod twirl;

pub use clifford::{sc_enumerate, sc_order, sc_sample, sc_sampling_bias, transitivity_counts, CliffordElem, Provenance};
pub use pauli::{all_paulis, pauli_matrix, CMatrix, PauliOp};
pub use qnmc::{identity_weight, isometry_kraus, Qnmc, QnmcCodeword, QuantumTamperReport};
pub use state::{
    canonical_purification, fidelity_pure, maximally_entangled, random_density, random_pure, trace_norm_distance, CVector,
    DenseState, DensityMatrix, Part,
};
pub use twirl::{
    conjugated_average_closed_form, conjugated_pauli_average, one_design_average, one_design_target, purified_twirl_residual,
    twirl_residual, TwirlGroup,
};
