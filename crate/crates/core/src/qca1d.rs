//! State-vector simulation of the 1D fermionic and bosonic QCAs.
//!
//! Each site `x` carries two modes `(x,+)` and `(x,−)`; mode `(x,s)` has
//! index `m = 2x + s` with `s = 0` for `+` and `s = 1` for `−`. A fermion
//! basis state is a bitstring whose bit `m` is the occupation of mode `m`.
//! Boson basis states are occupation vectors with total number at most
//! `B_max`.
//!
//! One step is `Û = Ĉ Σ̂`: `Σ̂` first couples `(x,+)` with `(x+1,−)`
//! (periodically), then `Ĉ` couples `(x,+)` with `(x,−)`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::matrix::{eig_hermitian, ComplexMatrix, EigenDecomposition, LinalgError, C64};

/// Largest fermion mode count simulated as a full state vector.
pub const MAX_FERMION_MODES: usize = 16;
/// Largest truncated boson (or joint) dimension accepted.
pub const MAX_STATE_DIM: usize = 1_000_000;
/// Largest fermion-number sector exponentiated densely by [`interaction_unitary`].
pub const MAX_SECTOR_DIM: usize = 6000;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Qca1dError {
    #[error("state dimension {dim} exceeds the limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("invalid lattice: {0}")]
    InvalidConfig(String),
    #[error("state is not normalised: ‖ψ‖ = {0}")]
    NotNormalized(f64),
    #[error("unknown basis label {0:?}")]
    UnknownLabel(String),
    #[error("{0}")]
    SpeciesMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeSpecies {
    Fermion,
    Boson,
}

/// Which form of the local gates is used.
///
/// `Table` uses the explicit two-qubit maps, where `|11⟩ → −|11⟩` and the
/// gates are real and self-inverse. `Exponential` uses
/// `exp{−iφ(c†_a c_b + c†_b c_a)}` with `φ = π/2 + θ` for the coin and
/// `φ = π/2` for the shift. Bosons always use the exponential form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GateConvention {
    #[default]
    Table,
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lattice1DConfig {
    pub n_sites: usize,
    pub species: LatticeSpecies,
    pub theta: f64,
    /// Maximum total boson number (ignored for fermions).
    pub boson_truncation: usize,
    pub convention: GateConvention,
}

impl Lattice1DConfig {
    pub fn fermion(n_sites: usize, theta: f64) -> Self {
        Self {
            n_sites,
            species: LatticeSpecies::Fermion,
            theta,
            boson_truncation: 0,
            convention: GateConvention::Table,
        }
    }

    pub fn boson(n_sites: usize, boson_truncation: usize) -> Self {
        Self {
            n_sites,
            species: LatticeSpecies::Boson,
            theta: 0.0,
            boson_truncation,
            convention: GateConvention::Exponential,
        }
    }

    pub fn with_convention(mut self, convention: GateConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn n_modes(&self) -> usize {
        2 * self.n_sites
    }

    pub fn validate(&self) -> Result<(), Qca1dError> {
        if self.n_sites < 2 || self.n_sites % 2 != 0 {
            return Err(Qca1dError::InvalidConfig(format!(
                "n_sites must be even and at least 2 (got {})",
                self.n_sites
            )));
        }
        match self.species {
            LatticeSpecies::Fermion => {
                if self.n_modes() > MAX_FERMION_MODES {
                    return Err(Qca1dError::DimensionTooLarge {
                        dim: 1usize << self.n_modes().min(60),
                        limit: 1 << MAX_FERMION_MODES,
                    });
                }
            }
            LatticeSpecies::Boson => {
                if self.theta != 0.0 {
                    return Err(Qca1dError::InvalidConfig(
                        "boson lattice has no mass parameter".into(),
                    ));
                }
                let dim = boson_dimension(self.n_modes(), self.boson_truncation);
                if dim > MAX_STATE_DIM {
                    return Err(Qca1dError::DimensionTooLarge {
                        dim,
                        limit: MAX_STATE_DIM,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn basis(&self) -> Result<Basis, Qca1dError> {
        self.validate()?;
        Ok(match self.species {
            LatticeSpecies::Fermion => Basis::Fermion {
                n_modes: self.n_modes(),
            },
            LatticeSpecies::Boson => Basis::Boson(Arc::new(BosonBasis::new(
                self.n_modes(),
                self.boson_truncation,
            ))),
        })
    }
}

/// Mode index of `(x, s)`; `plus = true` selects the `+` mode.
pub fn mode_index(x: usize, plus: bool) -> usize {
    2 * x + usize::from(!plus)
}

/// Number of occupation vectors over `modes` modes with total at most `max_total`.
pub fn boson_dimension(modes: usize, max_total: usize) -> usize {
    // C(modes + max_total, max_total), saturating.
    let mut acc: u128 = 1;
    for i in 1..=max_total as u128 {
        acc = acc * (modes as u128 + i) / i;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Truncated boson Fock basis ordered by total number, then lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct BosonBasis {
    pub n_modes: usize,
    pub max_total: usize,
    states: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl BosonBasis {
    pub fn new(n_modes: usize, max_total: usize) -> Self {
        fn fill(rest: usize, modes: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
            if prefix.len() == modes {
                if rest == 0 {
                    out.push(prefix.clone());
                }
                return;
            }
            for n in (0..=rest).rev() {
                prefix.push(n as u8);
                fill(rest - n, modes, prefix, out);
                prefix.pop();
            }
        }
        let mut states = Vec::new();
        for total in 0..=max_total {
            fill(total, n_modes, &mut Vec::with_capacity(n_modes), &mut states);
        }
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Self {
            n_modes,
            max_total,
            states,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> &[u8] {
        &self.states[i]
    }

    pub fn index_of(&self, occupation: &[u8]) -> Option<usize> {
        self.index.get(occupation).copied()
    }
}

/// Basis of a single lattice.
#[derive(Clone, Debug, PartialEq)]
pub enum Basis {
    Fermion { n_modes: usize },
    Boson(Arc<BosonBasis>),
}

impl Basis {
    pub fn dim(&self) -> usize {
        match self {
            Basis::Fermion { n_modes } => 1 << n_modes,
            Basis::Boson(b) => b.dim(),
        }
    }

    pub fn n_modes(&self) -> usize {
        match self {
            Basis::Fermion { n_modes } => *n_modes,
            Basis::Boson(b) => b.n_modes,
        }
    }

    /// Occupation of every mode in basis state `i`.
    pub fn occupations(&self, i: usize) -> Vec<u8> {
        match self {
            Basis::Fermion { n_modes } => (0..*n_modes).map(|m| ((i >> m) & 1) as u8).collect(),
            Basis::Boson(b) => b.state(i).to_vec(),
        }
    }

    pub fn index_of(&self, occupation: &[u8]) -> Option<usize> {
        if occupation.len() != self.n_modes() {
            return None;
        }
        match self {
            Basis::Fermion { .. } => {
                let mut idx = 0usize;
                for (m, &n) in occupation.iter().enumerate() {
                    match n {
                        0 => {}
                        1 => idx |= 1 << m,
                        _ => return None,
                    }
                }
                Some(idx)
            }
            Basis::Boson(b) => b.index_of(occupation),
        }
    }

    /// Label listing occupations site by site as `n₊n₋`, sites separated by `.`.
    pub fn label(&self, i: usize) -> String {
        let occ = self.occupations(i);
        occ.chunks(2)
            .map(|pair| pair.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(if pair.iter().any(|&n| n > 9) { "," } else { "" }))
            .collect::<Vec<_>>()
            .join(".")
    }

    pub fn parse_label(&self, label: &str) -> Result<usize, Qca1dError> {
        let mut occ = Vec::with_capacity(self.n_modes());
        for site in label.trim().split('.') {
            if site.contains(',') {
                for part in site.split(',') {
                    occ.push(part.parse::<u8>().map_err(|_| Qca1dError::UnknownLabel(label.into()))?);
                }
            } else {
                for ch in site.chars() {
                    let d = ch.to_digit(10).ok_or_else(|| Qca1dError::UnknownLabel(label.into()))?;
                    occ.push(d as u8);
                }
            }
        }
        self.index_of(&occ)
            .ok_or_else(|| Qca1dError::UnknownLabel(label.into()))
    }
}

/// Normalised state of one lattice.
#[derive(Clone, Debug)]
pub struct LatticeState1D {
    pub basis: Basis,
    pub amplitudes: Vec<C64>,
}

/// Tolerance on `‖ψ‖ − 1` for a state to count as normalised.
pub const NORM_TOL: f64 = 1e-12;

impl LatticeState1D {
    pub fn new(basis: Basis, amplitudes: Vec<C64>) -> Result<Self, Qca1dError> {
        if amplitudes.len() != basis.dim() {
            return Err(Qca1dError::InvalidConfig(format!(
                "{} amplitudes for a basis of dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        let n = vec_norm(&amplitudes);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Qca1dError::NotNormalized(n));
        }
        Ok(Self { basis, amplitudes })
    }

    pub fn basis_state(basis: Basis, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; basis.dim()];
        amplitudes[index] = ONE;
        Self { basis, amplitudes }
    }

    pub fn vacuum(basis: Basis) -> Self {
        Self::basis_state(basis, 0)
    }

    /// `c†_{x,s}|vac⟩`.
    pub fn single_excitation(basis: Basis, x: usize, plus: bool) -> Self {
        let mut occ = vec![0u8; basis.n_modes()];
        occ[mode_index(x, plus)] = 1;
        let idx = basis.index_of(&occ).expect("one excitation fits any truncation ≥ 1");
        Self::basis_state(basis, idx)
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amplitudes)
    }

    pub fn evolve(&self, op: &Operator) -> Self {
        Self {
            basis: self.basis.clone(),
            amplitudes: op.apply(&self.amplitudes),
        }
    }

    /// Nonzero amplitudes as `(label, re, im)` records in basis order.
    pub fn snapshot(&self, threshold: f64) -> Vec<(String, f64, f64)> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > threshold)
            .map(|(i, z)| (self.basis.label(i), z.re, z.im))
            .collect()
    }

    /// Rebuilds a state from `(label, re, im)` records; unlisted amplitudes are zero.
    pub fn from_records(basis: Basis, records: &[(String, f64, f64)]) -> Result<Self, Qca1dError> {
        let mut amplitudes = vec![ZERO; basis.dim()];
        for (label, re, im) in records {
            let idx = basis.parse_label(label)?;
            amplitudes[idx] += C64::new(*re, *im);
        }
        Self::new(basis, amplitudes)
    }
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn vec_distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub type Gate4 = [[C64; 4]; 4];

fn gate_from_matrix(m: &ComplexMatrix) -> Gate4 {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

fn gate_adjoint(g: &Gate4) -> Gate4 {
    std::array::from_fn(|i| std::array::from_fn(|j| g[j][i].conj()))
}

/// Coin gate on `|n₊ n₋⟩` (index `2n₊ + n₋`):
/// `|01⟩ → cos θ|10⟩ + sin θ|01⟩`, `|10⟩ → cos θ|01⟩ − sin θ|10⟩`, `|11⟩ → −|11⟩`.
pub fn coin_gate(theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(2, 1)] = C64::new(c, 0.0);
    m[(1, 1)] = C64::new(s, 0.0);
    m[(1, 2)] = C64::new(c, 0.0);
    m[(2, 2)] = C64::new(-s, 0.0);
    m[(3, 3)] = -ONE;
    m
}

/// Shift gate: swaps `|01⟩ ↔ |10⟩` and maps `|11⟩ → −|11⟩`.
pub fn shift_gate() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 2)] = ONE;
    m[(2, 1)] = ONE;
    m[(3, 3)] = -ONE;
    m
}

/// `exp{−iφ(c†_a c_b + c†_b c_a)}` on two fermion modes.
pub fn exponential_gate(phi: f64) -> ComplexMatrix {
    let (s, c) = phi.sin_cos();
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(3, 3)] = ONE;
    m[(1, 1)] = C64::new(c, 0.0);
    m[(2, 2)] = C64::new(c, 0.0);
    m[(1, 2)] = C64::new(0.0, -s);
    m[(2, 1)] = C64::new(0.0, -s);
    m
}

/// A linear operator on a state space, stored in factored form.
#[derive(Clone, Debug)]
pub enum Operator {
    Identity(usize),
    Diagonal(Vec<C64>),
    /// `e_j → phase_j · e_{target_j}`.
    PhasedPermutation { target: Vec<usize>, phase: Vec<C64> },
    /// Two-qubit gates on bits `(a, b)`, applied in list order. Gate
    /// indices follow `2n_a + n_b`.
    QubitGates { n_qubits: usize, gates: Vec<(usize, usize, Gate4)> },
    /// Dense blocks on disjoint index sets; indices outside every block
    /// are left unchanged.
    BlockSparse { dim: usize, blocks: Vec<(Vec<usize>, ComplexMatrix)> },
    /// `A ⊗ B` with joint index `i_A · dim(B) + i_B`.
    Kron(Box<Operator>, Box<Operator>),
    /// `ops[0] · ops[1] · … `, so the last factor acts first.
    Product(Vec<Operator>),
}

impl Operator {
    pub fn dim(&self) -> usize {
        match self {
            Operator::Identity(n) => *n,
            Operator::Diagonal(d) => d.len(),
            Operator::PhasedPermutation { target, .. } => target.len(),
            Operator::QubitGates { n_qubits, .. } => 1 << n_qubits,
            Operator::BlockSparse { dim, .. } => *dim,
            Operator::Kron(a, b) => a.dim() * b.dim(),
            Operator::Product(ops) => ops.first().map_or(0, Operator::dim),
        }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim(), "operator/state dimension mismatch");
        match self {
            Operator::Identity(_) => v.to_vec(),
            Operator::Diagonal(d) => v.iter().zip(d).map(|(x, y)| x * y).collect(),
            Operator::PhasedPermutation { target, phase } => {
                let mut out = vec![ZERO; v.len()];
                for (j, &x) in v.iter().enumerate() {
                    out[target[j]] += phase[j] * x;
                }
                out
            }
            Operator::QubitGates { gates, .. } => {
                let mut out = v.to_vec();
                for (a, b, g) in gates {
                    apply_qubit_gate(&mut out, *a, *b, g);
                }
                out
            }
            Operator::BlockSparse { blocks, .. } => {
                let mut out = v.to_vec();
                for (idx, m) in blocks {
                    let input: Vec<C64> = idx.iter().map(|&i| v[i]).collect();
                    if input.iter().all(|z| *z == ZERO) {
                        continue;
                    }
                    let res = m.mul_vec(&input);
                    for (&i, z) in idx.iter().zip(res) {
                        out[i] = z;
                    }
                }
                out
            }
            Operator::Kron(a, b) => {
                let (da, db) = (a.dim(), b.dim());
                let mut tmp = Vec::with_capacity(v.len());
                for ia in 0..da {
                    tmp.extend(b.apply(&v[ia * db..(ia + 1) * db]));
                }
                let mut out = vec![ZERO; v.len()];
                for ib in 0..db {
                    let col: Vec<C64> = (0..da).map(|ia| tmp[ia * db + ib]).collect();
                    if col.iter().all(|z| *z == ZERO) {
                        continue;
                    }
                    for (ia, z) in a.apply(&col).into_iter().enumerate() {
                        out[ia * db + ib] = z;
                    }
                }
                out
            }
            Operator::Product(ops) => {
                let mut out = v.to_vec();
                for op in ops.iter().rev() {
                    out = op.apply(&out);
                }
                out
            }
        }
    }

    pub fn adjoint(&self) -> Operator {
        match self {
            Operator::Identity(n) => Operator::Identity(*n),
            Operator::Diagonal(d) => Operator::Diagonal(d.iter().map(|z| z.conj()).collect()),
            Operator::PhasedPermutation { target, phase } => {
                let n = target.len();
                let mut t = vec![0; n];
                let mut p = vec![ZERO; n];
                for j in 0..n {
                    t[target[j]] = j;
                    p[target[j]] = phase[j].conj();
                }
                Operator::PhasedPermutation { target: t, phase: p }
            }
            Operator::QubitGates { n_qubits, gates } => Operator::QubitGates {
                n_qubits: *n_qubits,
                gates: gates
                    .iter()
                    .rev()
                    .map(|(a, b, g)| (*a, *b, gate_adjoint(g)))
                    .collect(),
            },
            Operator::BlockSparse { dim, blocks } => Operator::BlockSparse {
                dim: *dim,
                blocks: blocks
                    .iter()
                    .map(|(idx, m)| (idx.clone(), m.adjoint()))
                    .collect(),
            },
            Operator::Kron(a, b) => Operator::Kron(Box::new(a.adjoint()), Box::new(b.adjoint())),
            Operator::Product(ops) => Operator::Product(ops.iter().rev().map(Operator::adjoint).collect()),
        }
    }

    pub fn then(self, next: Operator) -> Operator {
        Operator::Product(vec![next, self])
    }

    /// Column `j` of the operator.
    pub fn column(&self, j: usize) -> Vec<C64> {
        let mut e = vec![ZERO; self.dim()];
        e[j] = ONE;
        self.apply(&e)
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            m.set_column(j, &self.column(j));
        }
        m
    }
}

fn apply_qubit_gate(v: &mut [C64], a: usize, b: usize, g: &Gate4) {
    let (ma, mb) = (1usize << a, 1usize << b);
    for i00 in 0..v.len() {
        if i00 & (ma | mb) != 0 {
            continue;
        }
        let idx = [i00, i00 | mb, i00 | ma, i00 | ma | mb];
        let x = idx.map(|i| v[i]);
        for (r, &i) in idx.iter().enumerate() {
            v[i] = g[r][0] * x[0] + g[r][1] * x[1] + g[r][2] * x[2] + g[r][3] * x[3];
        }
    }
}

/// `‖A − B‖_F`, evaluated column by column.
pub fn operator_distance(a: &Operator, b: &Operator) -> f64 {
    assert_eq!(a.dim(), b.dim());
    (0..a.dim())
        .map(|j| vec_distance(&a.column(j), &b.column(j)).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `‖AB − BA‖_F`.
pub fn commutator_norm(a: &Operator, b: &Operator) -> f64 {
    let ab = Operator::Product(vec![a.clone(), b.clone()]);
    let ba = Operator::Product(vec![b.clone(), a.clone()]);
    operator_distance(&ab, &ba)
}

/// Pairs coupled by `Σ̂`: `((x,+), (x+1,−))`.
fn shift_pairs(n_sites: usize) -> Vec<(usize, usize)> {
    (0..n_sites)
        .map(|x| (mode_index(x, true), mode_index((x + 1) % n_sites, false)))
        .collect()
}

/// Pairs coupled by `Ĉ`: `((x,+), (x,−))`.
fn coin_pairs(n_sites: usize) -> Vec<(usize, usize)> {
    (0..n_sites)
        .map(|x| (mode_index(x, true), mode_index(x, false)))
        .collect()
}

/// Boson layer of `exp{−iπ/2(a†_a a_b + a†_b a_a)}` gates on disjoint pairs:
/// `|n, m⟩ → (−i)^{n+m} |m, n⟩` on each pair.
fn boson_swap_layer(basis: &BosonBasis, pairs: &[(usize, usize)]) -> Operator {
    let minus_i = C64::new(0.0, -1.0);
    let mut target = Vec::with_capacity(basis.dim());
    let mut phase = Vec::with_capacity(basis.dim());
    for j in 0..basis.dim() {
        let mut occ = basis.state(j).to_vec();
        let mut moved = 0u32;
        for &(a, b) in pairs {
            moved += u32::from(occ[a]) + u32::from(occ[b]);
            occ.swap(a, b);
        }
        target.push(basis.index_of(&occ).expect("swaps preserve the total number"));
        phase.push(minus_i.powu(moved));
    }
    Operator::PhasedPermutation { target, phase }
}

fn fermion_layer(n_modes: usize, pairs: &[(usize, usize)], gate: &ComplexMatrix) -> Operator {
    let g = gate_from_matrix(gate);
    Operator::QubitGates {
        n_qubits: n_modes,
        gates: pairs.iter().map(|&(a, b)| (a, b, g)).collect(),
    }
}

/// The coin layer `Ĉ`.
pub fn coin_layer(cfg: &Lattice1DConfig) -> Result<Operator, Qca1dError> {
    let basis = cfg.basis()?;
    let pairs = coin_pairs(cfg.n_sites);
    Ok(match (&basis, cfg.convention) {
        (Basis::Fermion { n_modes }, GateConvention::Table) => {
            fermion_layer(*n_modes, &pairs, &coin_gate(cfg.theta))
        }
        (Basis::Fermion { n_modes }, GateConvention::Exponential) => {
            fermion_layer(*n_modes, &pairs, &exponential_gate(FRAC_PI_2 + cfg.theta))
        }
        (Basis::Boson(b), _) => boson_swap_layer(b, &pairs),
    })
}

/// The shift layer `Σ̂`.
pub fn shift_layer(cfg: &Lattice1DConfig) -> Result<Operator, Qca1dError> {
    let basis = cfg.basis()?;
    let pairs = shift_pairs(cfg.n_sites);
    Ok(match (&basis, cfg.convention) {
        (Basis::Fermion { n_modes }, GateConvention::Table) => {
            fermion_layer(*n_modes, &pairs, &shift_gate())
        }
        (Basis::Fermion { n_modes }, GateConvention::Exponential) => {
            fermion_layer(*n_modes, &pairs, &exponential_gate(FRAC_PI_2))
        }
        (Basis::Boson(b), _) => boson_swap_layer(b, &pairs),
    })
}

/// One step `Û = Ĉ Σ̂`.
pub fn build_evolution(cfg: &Lattice1DConfig) -> Result<Operator, Qca1dError> {
    Ok(Operator::Product(vec![coin_layer(cfg)?, shift_layer(cfg)?]))
}

/// `V = exp{iπ Σ_x n_{x,+}}`: the sign `(−1)^{Σ n_{x,+}}`.
pub fn plus_parity(cfg: &Lattice1DConfig) -> Result<Operator, Qca1dError> {
    let basis = cfg.basis()?;
    let diag = (0..basis.dim())
        .map(|i| {
            let occ = basis.occupations(i);
            let plus: u32 = (0..cfg.n_sites).map(|x| u32::from(occ[mode_index(x, true)])).sum();
            if plus % 2 == 0 {
                ONE
            } else {
                -ONE
            }
        })
        .collect();
    Ok(Operator::Diagonal(diag))
}

/// Time-reversal operator with `τ Û τ† = Û†`.
///
/// For the exponential gates `τ = Ĉ V†`: conjugating by `V` flips the sign
/// of every `+` mode operator and turns each gate into its inverse. The
/// table gates are Hermitian involutions, so there `Ĉ† = Ĉ`, `Σ̂† = Σ̂`
/// and `τ = Ĉ` already satisfies `τ Ĉ Σ̂ τ† = Σ̂ Ĉ = Û†`.
pub fn tau_operator(cfg: &Lattice1DConfig) -> Result<Operator, Qca1dError> {
    let coin = coin_layer(cfg)?;
    match (cfg.species, cfg.convention) {
        (LatticeSpecies::Fermion, GateConvention::Table) => Ok(coin),
        _ => Ok(Operator::Product(vec![coin, plus_parity(cfg)?.adjoint()])),
    }
}

/// `‖τ Û τ† − Û†‖_F`.
pub fn time_reversal_defect(cfg: &Lattice1DConfig) -> Result<f64, Qca1dError> {
    let u = build_evolution(cfg)?;
    let tau = tau_operator(cfg)?;
    let lhs = Operator::Product(vec![tau.clone(), u.clone(), tau.adjoint()]);
    Ok(operator_distance(&lhs, &u.adjoint()))
}

/// Indices of the one-excitation basis states, ordered by mode.
fn single_particle_indices(basis: &Basis) -> Vec<usize> {
    (0..basis.n_modes())
        .map(|m| {
            let mut occ = vec![0u8; basis.n_modes()];
            occ[m] = 1;
            basis.index_of(&occ).expect("single excitations are always in the basis")
        })
        .collect()
}

/// Restriction of `Û` to the one-excitation sector, rows and columns
/// ordered by mode index.
pub fn single_particle_block(cfg: &Lattice1DConfig) -> Result<ComplexMatrix, Qca1dError> {
    let basis = cfg.basis()?;
    if let Basis::Boson(b) = &basis {
        if b.max_total < 1 {
            return Err(Qca1dError::InvalidConfig(
                "boson truncation 0 has no one-particle sector".into(),
            ));
        }
    }
    let u = build_evolution(cfg)?;
    let idx = single_particle_indices(&basis);
    let mut block = ComplexMatrix::zeros(idx.len(), idx.len());
    for (c, &j) in idx.iter().enumerate() {
        let col = u.column(j);
        for (r, &i) in idx.iter().enumerate() {
            block[(r, c)] = col[i];
        }
    }
    Ok(block)
}

/// The one-particle walk `W = C_coin · S` built directly on `ℂ^{2N}`:
/// `S` moves `(x,+) ↔ (x+1,−)` and `C_coin` mixes `(x,+)` with `(x,−)`.
pub fn walk_matrix(cfg: &Lattice1DConfig) -> Result<ComplexMatrix, Qca1dError> {
    cfg.validate()?;
    let n = cfg.n_modes();
    let exponential = cfg.species == LatticeSpecies::Boson || cfg.convention == GateConvention::Exponential;
    let (coin, hop) = if exponential {
        let (s, c) = (FRAC_PI_2 + cfg.theta).sin_cos();
        let coin = [[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]];
        (coin, C64::new(0.0, -1.0))
    } else {
        let (s, c) = cfg.theta.sin_cos();
        let coin = [[C64::new(-s, 0.0), C64::new(c, 0.0)], [C64::new(c, 0.0), C64::new(s, 0.0)]];
        (coin, ONE)
    };
    let mut shift = ComplexMatrix::zeros(n, n);
    for (a, b) in shift_pairs(cfg.n_sites) {
        shift[(a, b)] = hop;
        shift[(b, a)] = hop;
    }
    let mut local = ComplexMatrix::zeros(n, n);
    for x in 0..cfg.n_sites {
        let (p, m) = (mode_index(x, true), mode_index(x, false));
        local[(p, p)] = coin[0][0];
        local[(p, m)] = coin[0][1];
        local[(m, p)] = coin[1][0];
        local[(m, m)] = coin[1][1];
    }
    Ok(local.matmul(&shift))
}

/// One-site translation `(x, s) → (x+1, s)`.
pub fn translation_operator(cfg: &Lattice1DConfig) -> Result<Operator, Qca1dError> {
    let basis = cfg.basis()?;
    let n_modes = basis.n_modes();
    let target = (0..basis.dim())
        .map(|i| {
            let occ = basis.occupations(i);
            let mut shifted = vec![0u8; n_modes];
            for m in 0..n_modes {
                shifted[(m + 2) % n_modes] = occ[m];
            }
            basis.index_of(&shifted).expect("translation preserves the basis")
        })
        .collect();
    Ok(Operator::PhasedPermutation {
        target,
        phase: vec![ONE; basis.dim()],
    })
}

/// Coupling coefficients of the fermion–boson interaction.
///
/// `H_I = Σ_x Σ_y Σ_{ℓmn} (w_x p_y α_{ℓmn} a_{x+y,ℓ} b†_{x,m} b_{x,n} + h.c.)`
/// with offsets `y ∈ {−M/2, …, M/2}`, profile `p_y` and optional site
/// weights `w_x` (uniform when absent). Index `0` of each `ℓ, m, n` axis is
/// `+`, index `1` is `−`.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionCoeffs {
    pub alpha: [[[C64; 2]; 2]; 2],
    pub range: usize,
    pub profile: Vec<C64>,
    pub site_weights: Option<Vec<f64>>,
}

impl InteractionCoeffs {
    /// Strictly on-site coupling.
    pub fn on_site(alpha: [[[C64; 2]; 2]; 2]) -> Self {
        Self {
            alpha,
            range: 0,
            profile: vec![ONE],
            site_weights: None,
        }
    }

    /// Every `α_{ℓmn}` equal to `value`.
    pub fn uniform(value: C64) -> Self {
        Self::on_site([[[value; 2]; 2]; 2])
    }

    pub fn validate(&self, n_sites: usize) -> Result<(), Qca1dError> {
        if self.range % 2 != 0 {
            return Err(Qca1dError::InvalidConfig(format!("range M = {} must be even", self.range)));
        }
        if self.profile.len() != self.range + 1 {
            return Err(Qca1dError::InvalidConfig(format!(
                "profile has {} entries, expected M + 1 = {}",
                self.profile.len(),
                self.range + 1
            )));
        }
        if let Some(w) = &self.site_weights {
            if w.len() != n_sites {
                return Err(Qca1dError::InvalidConfig("site_weights length must equal n_sites".into()));
            }
        }
        let finite = self.alpha.iter().flatten().flatten().chain(&self.profile).all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(Qca1dError::InvalidConfig("coefficients must be finite".into()));
        }
        Ok(())
    }
}

/// Basis of the joint fermion ⊗ boson space, joint index `f · dim_B + b`.
#[derive(Clone, Debug)]
pub struct JointSpace {
    pub fermion: Lattice1DConfig,
    pub boson: Lattice1DConfig,
    pub boson_basis: Arc<BosonBasis>,
}

impl JointSpace {
    pub fn new(cfg_f: &Lattice1DConfig, cfg_b: &Lattice1DConfig) -> Result<Self, Qca1dError> {
        if cfg_f.species != LatticeSpecies::Fermion || cfg_b.species != LatticeSpecies::Boson {
            return Err(Qca1dError::SpeciesMismatch(
                "joint space needs a fermion and a boson lattice".into(),
            ));
        }
        if cfg_f.n_sites != cfg_b.n_sites {
            return Err(Qca1dError::InvalidConfig("both lattices need the same n_sites".into()));
        }
        cfg_f.validate()?;
        let Basis::Boson(bb) = cfg_b.basis()? else { unreachable!() };
        let dim = (1usize << cfg_f.n_modes()).saturating_mul(bb.dim());
        if dim > MAX_STATE_DIM {
            return Err(Qca1dError::DimensionTooLarge {
                dim,
                limit: MAX_STATE_DIM,
            });
        }
        Ok(Self {
            fermion: cfg_f.clone(),
            boson: cfg_b.clone(),
            boson_basis: bb,
        })
    }

    pub fn fermion_dim(&self) -> usize {
        1 << self.fermion.n_modes()
    }

    pub fn boson_dim(&self) -> usize {
        self.boson_basis.dim()
    }

    pub fn dim(&self) -> usize {
        self.fermion_dim() * self.boson_dim()
    }

    /// Free step `Û_B Û_F` on the joint space.
    pub fn free_evolution(&self) -> Result<Operator, Qca1dError> {
        Ok(Operator::Kron(
            Box::new(build_evolution(&self.fermion)?),
            Box::new(build_evolution(&self.boson)?),
        ))
    }

    /// Joint one-site translation.
    pub fn translation(&self) -> Result<Operator, Qca1dError> {
        Ok(Operator::Kron(
            Box::new(translation_operator(&self.fermion)?),
            Box::new(translation_operator(&self.boson)?),
        ))
    }

    /// Total fermion number as a diagonal operator.
    pub fn fermion_number(&self) -> Operator {
        let db = self.boson_dim();
        Operator::Diagonal(
            (0..self.dim())
                .map(|j| C64::new(f64::from((j / db).count_ones()), 0.0))
                .collect(),
        )
    }

    /// Joint basis state for the given fermion and boson occupations.
    pub fn index_of(&self, fermion_occ: &[u8], boson_occ: &[u8]) -> Option<usize> {
        let f = Basis::Fermion { n_modes: self.fermion.n_modes() }.index_of(fermion_occ)?;
        let b = self.boson_basis.index_of(boson_occ)?;
        Some(f * self.boson_dim() + b)
    }

    pub fn label(&self, j: usize) -> String {
        let db = self.boson_dim();
        let fb = Basis::Fermion { n_modes: self.fermion.n_modes() };
        let bb = Basis::Boson(self.boson_basis.clone());
        format!("{}|{}", fb.label(j / db), bb.label(j % db))
    }
}

/// Per-sector matrices of `H_I`: each entry pairs joint indices (all with
/// the same fermion number) with the Hermitian block on them.
pub fn interaction_hamiltonian(
    space: &JointSpace,
    coeffs: &InteractionCoeffs,
) -> Result<Vec<(Vec<usize>, ComplexMatrix)>, Qca1dError> {
    let n = space.fermion.n_sites;
    coeffs.validate(n)?;
    let n_modes = space.fermion.n_modes();
    let db = space.boson_dim();
    let bb = &space.boson_basis;
    let half = (coeffs.range / 2) as isize;

    let mut sectors: Vec<Vec<usize>> = vec![Vec::new(); n_modes + 1];
    for f in 0..space.fermion_dim() {
        let k = f.count_ones() as usize;
        for b in 0..db {
            sectors[k].push(f * db + b);
        }
    }

    let mut out = Vec::new();
    for idx in sectors.into_iter().filter(|s| !s.is_empty()) {
        if idx.len() > MAX_SECTOR_DIM {
            return Err(Qca1dError::DimensionTooLarge {
                dim: idx.len(),
                limit: MAX_SECTOR_DIM,
            });
        }
        let local: HashMap<usize, usize> = idx.iter().enumerate().map(|(i, &j)| (j, i)).collect();
        let mut h = ComplexMatrix::zeros(idx.len(), idx.len());
        for (col, &j) in idx.iter().enumerate() {
            let (f, b) = (j / db, j % db);
            let occ = bb.state(b);
            for x in 0..n {
                let w = coeffs.site_weights.as_ref().map_or(1.0, |w| w[x]);
                for (yi, &p) in coeffs.profile.iter().enumerate() {
                    let y = yi as isize - half;
                    let bx = (x as isize + y).rem_euclid(n as isize) as usize;
                    for l in 0..2 {
                        let bm = 2 * bx + l;
                        if occ[bm] == 0 {
                            continue;
                        }
                        let mut lowered = occ.to_vec();
                        lowered[bm] -= 1;
                        let b2 = bb.index_of(&lowered).expect("lowering stays in the basis");
                        let amp_a = f64::from(occ[bm]).sqrt();
                        for m in 0..2 {
                            for s in 0..2 {
                                let alpha = coeffs.alpha[l][m][s];
                                if alpha == ZERO {
                                    continue;
                                }
                                let (fm, fs) = (2 * x + m, 2 * x + s);
                                let f2 = if m == s {
                                    if f >> fs & 1 == 0 {
                                        continue;
                                    }
                                    f
                                } else {
                                    if f >> fs & 1 == 0 || f >> fm & 1 == 1 {
                                        continue;
                                    }
                                    f ^ (1 << fs) ^ (1 << fm)
                                };
                                let row = local[&(f2 * db + b2)];
                                let v = alpha * p * w * amp_a;
                                h[(row, col)] += v;
                                h[(col, row)] += v.conj();
                            }
                        }
                    }
                }
            }
        }
        out.push((idx, h));
    }
    Ok(out)
}

/// `U_I = exp{−iH_I}` on the truncated joint space, exponentiated exactly
/// within each fermion-number sector.
pub fn interaction_unitary(
    cfg_f: &Lattice1DConfig,
    cfg_b: &Lattice1DConfig,
    coeffs: &InteractionCoeffs,
) -> Result<Operator, Qca1dError> {
    let space = JointSpace::new(cfg_f, cfg_b)?;
    let blocks = interaction_hamiltonian(&space, coeffs)?;
    let mut out = Vec::with_capacity(blocks.len());
    for (idx, h) in blocks {
        let eig = eig_hermitian(&h)?;
        let phases = eig.values.iter().map(|l| C64::from_polar(1.0, -l.re)).collect();
        let u = EigenDecomposition {
            values: phases,
            vectors: eig.vectors,
        }
        .reconstruct();
        out.push((idx, u));
    }
    Ok(Operator::BlockSparse {
        dim: space.dim(),
        blocks: out,
    })
}

/// `‖U T − T U‖_F` with `T` the joint one-site translation (or the single
/// lattice translation when `cfg_b` is absent).
pub fn translation_commutator(
    u: &Operator,
    cfg_f: &Lattice1DConfig,
    cfg_b: Option<&Lattice1DConfig>,
) -> Result<f64, Qca1dError> {
    let t = match cfg_b {
        Some(b) => JointSpace::new(cfg_f, b)?.translation()?,
        None => translation_operator(cfg_f)?,
    };
    if t.dim() != u.dim() {
        return Err(Qca1dError::InvalidConfig(format!(
            "operator dimension {} does not match the lattice dimension {}",
            u.dim(),
            t.dim()
        )));
    }
    Ok(commutator_norm(u, &t))
}

/// Lattice momenta `k = 2πj/N`, `−N/2 < j ≤ N/2`.
pub fn momentum_grid(n_sites: usize) -> Vec<f64> {
    let n = n_sites as i64;
    (-(n / 2) + 1..=n / 2)
        .map(|j| 2.0 * PI * j as f64 / n_sites as f64)
        .collect()
}

/// Boson populations at one momentum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentumPopulation {
    pub k: f64,
    /// `⟨a†_{k,+} a_{k,+}⟩`.
    pub plus: f64,
    /// `⟨a†_{k,−} a_{k,−}⟩`.
    pub minus: f64,
    /// Positive-energy branch: `(k,+)` for `k > 0`, `(k,−)` for `k ≤ 0`.
    pub positive: f64,
    pub negative: f64,
}

/// One-body density matrix `ρ_{m,m'} = ⟨a†_m a_{m'}⟩` of the bosons. The
/// amplitudes may live on a joint space `spectator ⊗ bosons` with joint
/// index `s · dim_B + b`.
pub fn boson_density_matrix(amplitudes: &[C64], basis: &BosonBasis) -> ComplexMatrix {
    let db = basis.dim();
    assert_eq!(amplitudes.len() % db, 0, "amplitudes do not factor over the boson basis");
    let spectators = amplitudes.len() / db;
    let nm = basis.n_modes;
    let mut rho = ComplexMatrix::zeros(nm, nm);
    for s in 0..spectators {
        let block = &amplitudes[s * db..(s + 1) * db];
        for (b, &amp) in block.iter().enumerate() {
            if amp == ZERO {
                continue;
            }
            let occ = basis.state(b);
            // a†_m a_{m'} |occ⟩ contributes ⟨occ'| with occ' = occ − e_{m'} + e_m.
            for mp in 0..nm {
                if occ[mp] == 0 {
                    continue;
                }
                let mut lowered = occ.to_vec();
                lowered[mp] -= 1;
                let a_low = f64::from(occ[mp]).sqrt();
                for m in 0..nm {
                    let mut raised = lowered.clone();
                    raised[m] += 1;
                    let Some(b2) = basis.index_of(&raised) else { continue };
                    let a_up = f64::from(raised[m]).sqrt();
                    rho[(m, mp)] += block[b2].conj() * amp * a_low * a_up;
                }
            }
        }
    }
    rho
}

/// Boson populations per momentum and branch, using
/// `a_{k,s} = N^{−1/2} Σ_x e^{ixk} a_{x,s}`.
pub fn negative_mode_population(
    amplitudes: &[C64],
    basis: &BosonBasis,
) -> Vec<MomentumPopulation> {
    let n = basis.n_modes / 2;
    let rho = boson_density_matrix(amplitudes, basis);
    momentum_grid(n)
        .into_iter()
        .map(|k| {
            let branch = |plus: bool| -> f64 {
                let mut acc = ZERO;
                for x in 0..n {
                    for xp in 0..n {
                        let phase = C64::from_polar(1.0, k * (xp as f64 - x as f64));
                        acc += phase * rho[(mode_index(x, plus), mode_index(xp, plus))];
                    }
                }
                acc.re / n as f64
            };
            let (plus, minus) = (branch(true), branch(false));
            let (positive, negative) = if k > 0.0 { (plus, minus) } else { (minus, plus) };
            MomentumPopulation {
                k,
                plus,
                minus,
                positive,
                negative,
            }
        })
        .collect()
}

/// Boson populations of a single-lattice boson state.
pub fn negative_mode_population_state(
    state: &LatticeState1D,
) -> Result<Vec<MomentumPopulation>, Qca1dError> {
    match &state.basis {
        Basis::Boson(b) => Ok(negative_mode_population(&state.amplitudes, b)),
        Basis::Fermion { .. } => Err(Qca1dError::SpeciesMismatch(
            "momentum populations need a boson state".into(),
        )),
    }
}
