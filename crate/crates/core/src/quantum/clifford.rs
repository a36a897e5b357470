use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::OnceLock;

use num_complex::Complex64;

use super::pauli::{all_paulis, CMatrix, PauliOp};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::field::FieldDescriptor;

/// Largest register for which the subgroup is built.
pub const MAX_SC_QUBITS: usize = 2;

const TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Enumerated,
    Sampled,
}

/// A Clifford unitary, normalized so that its first non-negligible entry
/// (column-major) is real and positive.
#[derive(Clone, Debug)]
pub struct CliffordElem {
    matrix: CMatrix,
    qubits: usize,
    provenance: Provenance,
}

fn normalize_phase(m: &CMatrix) -> CMatrix {
    let pivot = m.iter().find(|z| z.norm() > 1e-6).copied().unwrap_or(Complex64::new(1.0, 0.0));
    let phase = pivot / pivot.norm();
    m.map(|z| z / phase)
}

impl CliffordElem {
    /// Validates unitarity and the Pauli normalizer property.
    pub fn new(matrix: CMatrix, qubits: usize) -> Result<Self> {
        let dim = 1usize << qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::LengthMismatch { expected: dim, actual: matrix.nrows() });
        }
        let e = Self { matrix: normalize_phase(&matrix), qubits, provenance: Provenance::Enumerated };
        if (e.matrix.adjoint() * &e.matrix - CMatrix::identity(dim, dim)).norm() > 1e-10 {
            return Err(Error::InvalidState("matrix is not unitary".into()));
        }
        for p in all_paulis(qubits)? {
            if e.conjugate(&p).is_none() {
                return Err(Error::InvalidState(format!("conjugation does not map {p} to a Pauli")));
            }
        }
        Ok(e)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn adjoint_matrix(&self) -> CMatrix {
        self.matrix.adjoint()
    }

    /// `C^dag P C` as a Pauli with exact sign, if it is one.
    pub fn conjugate(&self, p: &PauliOp) -> Option<PauliOp> {
        identify_pauli(&(self.matrix.adjoint() * p.matrix() * &self.matrix), self.qubits)
    }

    /// Equality modulo global phase.
    pub fn same_as(&self, other: &Self) -> bool {
        self.qubits == other.qubits && (&self.matrix - &other.matrix).norm() < 1e-9
    }
}

/// The Pauli (with phase) equal to `m`, if any.
pub fn identify_pauli(m: &CMatrix, qubits: usize) -> Option<PauliOp> {
    let dim = (1usize << qubits) as f64;
    for p in all_paulis(qubits).ok()? {
        let coef = (p.matrix().adjoint() * m).trace() / dim;
        if (coef.norm() - 1.0).abs() < TOL {
            let phase = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
                .iter()
                .position(|&(re, im)| (coef - Complex64::new(re, im)).norm() < TOL)?;
            let q = PauliOp::new(qubits, p.x_mask(), p.z_mask(), p.phase() + phase as u8).ok()?;
            return ((q.matrix() - m).norm() < 1e-8).then_some(q);
        }
    }
    None
}

fn gate_h() -> CMatrix {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    CMatrix::from_row_slice(2, 2, &[s, s, s, -s])
}

fn gate_s() -> CMatrix {
    let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    CMatrix::from_row_slice(2, 2, &[o, z, z, Complex64::new(0.0, 1.0)])
}

fn embed(gate: &CMatrix, qubit: usize, qubits: usize) -> CMatrix {
    let mut m = CMatrix::identity(1, 1);
    for q in 0..qubits {
        m = if q == qubit { m.kronecker(gate) } else { m.kronecker(&CMatrix::identity(2, 2)) };
    }
    m
}

fn cnot(control: usize, target: usize, qubits: usize) -> CMatrix {
    let dim = 1usize << qubits;
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let c = (col >> (qubits - 1 - control)) & 1;
        let row = col ^ (c << (qubits - 1 - target));
        m[(row, col)] = Complex64::new(1.0, 0.0);
    }
    m
}

fn generators(qubits: usize) -> Vec<CMatrix> {
    let mut g = Vec::new();
    for q in 0..qubits {
        g.push(embed(&gate_h(), q, qubits));
        g.push(embed(&gate_s(), q, qubits));
    }
    for q in 0..qubits.saturating_sub(1) {
        g.push(cnot(q, q + 1, qubits));
    }
    g
}

/// Images of the basis labels `1 << i`, `i < 2m`, under `P -> U P U^dag`.
fn symplectic_key(u: &CMatrix, qubits: usize) -> Option<Vec<u32>> {
    (0..2 * qubits)
        .map(|i| {
            let label = 1u32 << i;
            let (x, z) = (label >> qubits, label & ((1 << qubits) - 1));
            let p = PauliOp::new(qubits, x, z, 0).ok()?;
            identify_pauli(&(u * p.matrix() * u.adjoint()), qubits).map(|q| q.symplectic_index())
        })
        .collect()
}

/// One representative unitary per symplectic class, by breadth-first search
/// over products of `H`, `S` and nearest-neighbour `CNOT`.
fn symplectic_representatives(qubits: usize) -> BTreeMap<Vec<u32>, CMatrix> {
    let gens = generators(qubits);
    let id = CMatrix::identity(1 << qubits, 1 << qubits);
    let mut seen = BTreeMap::new();
    seen.insert(symplectic_key(&id, qubits).unwrap(), id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(u) = queue.pop_front() {
        for g in &gens {
            let v = g * &u;
            let key = symplectic_key(&v, qubits).expect("generators are Clifford");
            if let std::collections::btree_map::Entry::Vacant(e) = seen.entry(key) {
                e.insert(v.clone());
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Symplectic images of `SL(2, GF(2^m))` acting on `GF(2^m)^2`, written in a
/// basis and its trace-dual so that the symplectic form becomes
/// `tr(u v' + v u')`.
fn sl2_keys(qubits: usize) -> Result<Vec<Vec<u32>>> {
    let f = FieldDescriptor::binary(qubits as u32)?;
    let m = qubits;
    let basis: Vec<u32> = (0..m).map(|j| 1u32 << j).collect();
    let dual: Vec<u32> = (0..m)
        .map(|j| {
            (0..1u32 << m)
                .find(|&c| (0..m).all(|i| f.trace(f.mul(basis[i], c)) == u32::from(i == j)))
                .expect("trace form is non-degenerate")
        })
        .collect();
    let to_field = |bits: u32, b: &[u32]| (0..m).fold(0u32, |acc, j| if (bits >> j) & 1 == 1 { f.add(acc, b[j]) } else { acc });
    let coords = |u: u32, pair: &[u32]| (0..m).fold(0u32, |acc, j| acc | (f.trace(f.mul(u, pair[j])) << j));
    let mut keys = Vec::new();
    for a in 0..1u32 << m {
        for b in 0..1u32 << m {
            for c in 0..1u32 << m {
                for d in 0..1u32 << m {
                    if f.add(f.mul(a, d), f.mul(b, c)) != 1 {
                        continue;
                    }
                    let key = (0..2 * m)
                        .map(|i| {
                            let label = 1u32 << i;
                            let u = to_field(label >> m, &basis);
                            let v = to_field(label & ((1 << m) - 1), &dual);
                            let (u2, v2) = (f.add(f.mul(a, u), f.mul(b, v)), f.add(f.mul(c, u), f.mul(d, v)));
                            // x_j = tr(u f_j), z_j = tr(v e_j)
                            (coords(u2, &dual) << m) | coords(v2, &basis)
                        })
                        .collect();
                    keys.push(key);
                }
            }
        }
    }
    Ok(keys)
}

/// Order `2^{5m} - 2^{3m}` of the subgroup.
pub fn sc_order(qubits: usize) -> usize {
    (1usize << (5 * qubits)) - (1usize << (3 * qubits))
}

fn build_sc(qubits: usize) -> Result<Vec<CliffordElem>> {
    let reps = symplectic_representatives(qubits);
    let id_key: Vec<u32> = (0..2 * qubits).map(|i| 1u32 << i).collect();
    let mut keys = sl2_keys(qubits)?;
    keys.sort();
    keys.dedup();
    keys.sort_by_key(|k| *k != id_key);
    let paulis = all_paulis(qubits)?;
    let mut out = Vec::with_capacity(keys.len() * paulis.len());
    for key in &keys {
        let u = reps
            .get(key)
            .ok_or_else(|| Error::InvalidState("SL(2) element has no Clifford representative".into()))?;
        for p in &paulis {
            out.push(CliffordElem::new(p.matrix() * u, qubits)?);
        }
    }
    validate_sc(&out, qubits)?;
    Ok(out)
}

/// Order, Pauli containment and the transitivity count.
fn validate_sc(group: &[CliffordElem], qubits: usize) -> Result<()> {
    let fail = |what: String| Err(Error::InvalidState(format!("subgroup construction failed: {what}")));
    if group.len() != sc_order(qubits) {
        return fail(format!("order {} instead of {}", group.len(), sc_order(qubits)));
    }
    let mut classes: HashMap<Vec<(i64, i64)>, usize> = HashMap::new();
    for c in group {
        let key = c.matrix.iter().map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64)).collect();
        *classes.entry(key).or_insert(0) += 1;
    }
    if classes.len() != group.len() {
        return fail("repeated elements".into());
    }
    for p in all_paulis(qubits)? {
        let pe = CliffordElem::new(p.matrix(), qubits)?;
        if !group.iter().any(|c| c.same_as(&pe)) {
            return fail(format!("Pauli {p} missing"));
        }
    }
    let expected = group.len() / ((1 << (2 * qubits)) - 1);
    for (_, count) in transitivity_counts_of(group, qubits)? {
        if count != expected {
            return fail(format!("transitivity count {count} instead of {expected}"));
        }
    }
    Ok(())
}

fn transitivity_counts_of(group: &[CliffordElem], qubits: usize) -> Result<Vec<((PauliOp, PauliOp), usize)>> {
    let nontrivial: Vec<PauliOp> = all_paulis(qubits)?.into_iter().skip(1).collect();
    let mut counts: BTreeMap<(PauliOp, PauliOp), usize> = BTreeMap::new();
    for c in group {
        for p in &nontrivial {
            let q = c.conjugate(p).ok_or_else(|| Error::InvalidState("not a Clifford".into()))?;
            let q = nontrivial.iter().find(|r| r.same_up_to_phase(&q)).copied().unwrap();
            *counts.entry((*p, q)).or_insert(0) += 1;
        }
    }
    Ok(nontrivial
        .iter()
        .flat_map(|p| nontrivial.iter().map(move |q| (*p, *q)))
        .map(|k| (k, counts.get(&k).copied().unwrap_or(0)))
        .collect())
}

static SC1: OnceLock<Vec<CliffordElem>> = OnceLock::new();
static SC2: OnceLock<Vec<CliffordElem>> = OnceLock::new();

/// The full subgroup, modulo global phase, identity first.
pub fn sc_enumerate(qubits: usize) -> Result<&'static [CliffordElem]> {
    let cell = match qubits {
        1 => &SC1,
        2 => &SC2,
        _ => return Err(Error::Unsupported(format!("subgroup on {qubits} qubits"))),
    };
    if let Some(v) = cell.get() {
        return Ok(v);
    }
    let built = build_sc(qubits)?;
    Ok(cell.get_or_init(|| built))
}

/// For each ordered pair of non-identity Paulis `(P, Q)`, the number of
/// elements with `C^dag P C = +-Q`.
pub fn transitivity_counts(qubits: usize) -> Result<Vec<((PauliOp, PauliOp), usize)>> {
    transitivity_counts_of(sc_enumerate(qubits)?, qubits)
}

/// Element `int(r) mod |SC|` for a `5m`-bit string.
pub fn sc_sample(r: &BitString, qubits: usize) -> Result<CliffordElem> {
    if r.len() != 5 * qubits {
        return Err(Error::LengthMismatch { expected: 5 * qubits, actual: r.len() });
    }
    let mut e = sc_sample_index(r.to_u64(), qubits)?.clone();
    e.provenance = Provenance::Sampled;
    Ok(e)
}

pub(crate) fn sc_sample_index(r: u64, qubits: usize) -> Result<&'static CliffordElem> {
    let group = sc_enumerate(qubits)?;
    Ok(&group[(r % group.len() as u64) as usize])
}

/// Distance from uniform of the element drawn by modular indexing of a
/// uniform `5m`-bit string.
pub fn sc_sampling_bias(qubits: usize) -> f64 {
    let n = 1u64 << (5 * qubits);
    let k = sc_order(qubits) as u64;
    let (q, rem) = (n / k, n % k);
    rem as f64 * ((q + 1) as f64 / n as f64 - 1.0 / k as f64)
}
