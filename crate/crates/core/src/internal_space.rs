//! Internal (coin) spaces of the fermion and boson walks.
//!
//! The fermion space is the Dirac representation with `γ₀ = σ_Z ⊗ I`,
//! `γ_j = iσ_Y ⊗ σ_j`, so that the shift difference operators are
//! `ΔP_j = γ₀γ_j = σ_X ⊗ σ_j`. The boson space is built from the spin-1
//! matrices `J_j`, optionally doubled by `J_j → σ_Z ⊗ J_j`.

use serde::Serialize;
use thiserror::Error;

use crate::matrix::{kron, ComplexMatrix, C64};

/// Axis labels in the order used by every per-axis array.
pub const AXES: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Species {
    Fermion,
    Boson,
    BosonDoubled,
}

impl Species {
    pub fn is_boson(self) -> bool {
        !matches!(self, Species::Fermion)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InternalSpaceError {
    #[error("equal-norm violation {max_violation:e} exceeds tolerance {tolerance:e}")]
    ViolationAboveTolerance { max_violation: f64, tolerance: f64 },
}

/// Projectors and generators of one internal space.
#[derive(Clone, Debug)]
pub struct InternalSpace {
    pub species: Species,
    pub dim: usize,
    /// Coin generator; the zero matrix for massless bosons.
    pub q: ComplexMatrix,
    pub p_plus: [ComplexMatrix; 3],
    pub p_minus: [ComplexMatrix; 3],
    /// Stay-in-place projectors (bosons only).
    pub p_zero: Option<[ComplexMatrix; 3]>,
    pub delta_p: [ComplexMatrix; 3],
    /// Parity operator (fermions and doubled bosons).
    pub parity: Option<ComplexMatrix>,
}

/// Measured equal-norm constants.
#[derive(Clone, Debug, Serialize)]
pub struct EqualNormReport {
    pub species: Species,
    /// Constant in `P_i^k P_j^{k'} P_i^k = c P_i^k` for `k, k' = ±`, `i ≠ j`.
    pub c: f64,
    /// Constant in `P_i^k P_j^0 P_i^k = c' P_i^k` and `P_i^0 P_j^k P_i^0 = c' P_i^0`.
    pub c_prime: Option<f64>,
    /// Largest Frobenius deviation over all checked identities.
    pub max_violation: f64,
}

/// Tolerance applied by [`verify_equal_norm`].
pub const EQUAL_NORM_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]])
}

pub fn paulis() -> [ComplexMatrix; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

/// Spin-1 matrices with `(J_i)_{jk} = −i ε_{ijk}`.
pub fn spin1_matrices() -> [ComplexMatrix; 3] {
    let z = c(0.0, 0.0);
    let p = c(0.0, 1.0);
    let m = c(0.0, -1.0);
    [
        ComplexMatrix::from_rows(&[vec![z, z, z], vec![z, z, m], vec![z, p, z]]),
        ComplexMatrix::from_rows(&[vec![z, z, p], vec![z, z, z], vec![m, z, z]]),
        ComplexMatrix::from_rows(&[vec![z, m, z], vec![p, z, z], vec![z, z, z]]),
    ]
}

/// Dirac gamma matrices `[γ₀, γ₁, γ₂, γ₃]`.
pub fn dirac_gammas() -> [ComplexMatrix; 4] {
    let i2 = ComplexMatrix::identity(2);
    let isy = pauli_y().scale(c(0.0, 1.0));
    let [sx, sy, sz] = paulis();
    [
        kron(&pauli_z(), &i2),
        kron(&isy, &sx),
        kron(&isy, &sy),
        kron(&isy, &sz),
    ]
}

/// Boson gamma matrices `[γ₀ᵇ, γ₁ᵇ, γ₂ᵇ, γ₃ᵇ]` on the doubled space:
/// `γ₀ᵇ = σ_X ⊗ I`, `γ_iᵇ = −iσ_Y ⊗ J_i`.
pub fn boson_gammas() -> [ComplexMatrix; 4] {
    let misy = pauli_y().scale(c(0.0, -1.0));
    let [jx, jy, jz] = spin1_matrices();
    [
        kron(&pauli_x(), &ComplexMatrix::identity(3)),
        kron(&misy, &jx),
        kron(&misy, &jy),
        kron(&misy, &jz),
    ]
}

pub fn build_fermion_space() -> InternalSpace {
    let g = dirac_gammas();
    let id = ComplexMatrix::identity(4);
    let delta_p: [ComplexMatrix; 3] = std::array::from_fn(|j| g[0].matmul(&g[j + 1]));
    let p_plus = std::array::from_fn(|j| (&id + &delta_p[j]).scale_real(0.5));
    let p_minus = std::array::from_fn(|j| (&id - &delta_p[j]).scale_real(0.5));
    InternalSpace {
        species: Species::Fermion,
        dim: 4,
        q: g[0].clone(),
        p_plus,
        p_minus,
        p_zero: None,
        delta_p,
        parity: Some(g[0].clone()),
    }
}

pub fn build_boson_space(doubled: bool) -> InternalSpace {
    let j = spin1_matrices();
    let i3 = ComplexMatrix::identity(3);
    let j2: [ComplexMatrix; 3] = std::array::from_fn(|a| j[a].matmul(&j[a]));
    if !doubled {
        let p_plus = std::array::from_fn(|a| (&j2[a] + &j[a]).scale_real(0.5));
        let p_minus = std::array::from_fn(|a| (&j2[a] - &j[a]).scale_real(0.5));
        let p_zero = std::array::from_fn(|a| &i3 - &j2[a]);
        return InternalSpace {
            species: Species::Boson,
            dim: 3,
            q: ComplexMatrix::zeros(3, 3),
            p_plus,
            p_minus,
            p_zero: Some(p_zero),
            delta_p: j,
            parity: None,
        };
    }
    let i2 = ComplexMatrix::identity(2);
    let sz = pauli_z();
    let outer_j2: [ComplexMatrix; 3] = std::array::from_fn(|a| kron(&i2, &j2[a]));
    let delta_p: [ComplexMatrix; 3] = std::array::from_fn(|a| kron(&sz, &j[a]));
    InternalSpace {
        species: Species::BosonDoubled,
        dim: 6,
        q: ComplexMatrix::zeros(6, 6),
        p_plus: std::array::from_fn(|a| (&outer_j2[a] + &delta_p[a]).scale_real(0.5)),
        p_minus: std::array::from_fn(|a| (&outer_j2[a] - &delta_p[a]).scale_real(0.5)),
        p_zero: Some(std::array::from_fn(|a| kron(&i2, &(&i3 - &j2[a])))),
        delta_p,
        parity: Some(kron(&pauli_x(), &i3)),
    }
}

pub fn build_space(species: Species) -> InternalSpace {
    match species {
        Species::Fermion => build_fermion_space(),
        Species::Boson => build_boson_space(false),
        Species::BosonDoubled => build_boson_space(true),
    }
}

/// Ratio `tr(P_i A P_i) / tr(P_i)` and the residual `‖P_i A P_i − ratio·P_i‖_F`.
fn sandwich(p_outer: &ComplexMatrix, a: &ComplexMatrix) -> (f64, ComplexMatrix) {
    let s = p_outer.matmul(a).matmul(p_outer);
    let ratio = s.trace().re / p_outer.trace().re;
    (ratio, s)
}

/// Measures `c` (and `c'` for bosons) from the sandwich identities over all
/// ordered axis pairs `i ≠ j` and all signs.
pub fn verify_equal_norm(space: &InternalSpace) -> Result<EqualNormReport, InternalSpaceError> {
    let signed = |a: usize| [&space.p_plus[a], &space.p_minus[a]];
    let mut c_sum = 0.0;
    let mut c_count = 0usize;
    let mut cp_sum = 0.0;
    let mut cp_count = 0usize;
    let mut pending: Vec<(bool, ComplexMatrix, ComplexMatrix)> = Vec::new();

    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            for outer in signed(i) {
                for inner in signed(j) {
                    let (ratio, s) = sandwich(outer, inner);
                    c_sum += ratio;
                    c_count += 1;
                    pending.push((false, s, outer.clone()));
                }
                if let Some(p0) = &space.p_zero {
                    let (ratio, s) = sandwich(outer, &p0[j]);
                    cp_sum += ratio;
                    cp_count += 1;
                    pending.push((true, s, outer.clone()));
                }
            }
            if let Some(p0) = &space.p_zero {
                for inner in signed(j) {
                    let (ratio, s) = sandwich(&p0[i], inner);
                    cp_sum += ratio;
                    cp_count += 1;
                    pending.push((true, s, p0[i].clone()));
                }
            }
        }
    }

    let c_val = c_sum / c_count as f64;
    let cp_val = (cp_count > 0).then(|| cp_sum / cp_count as f64);
    let mut max_violation: f64 = 0.0;
    for (is_prime, s, p) in &pending {
        let constant = if *is_prime { cp_val.unwrap_or(0.0) } else { c_val };
        max_violation = max_violation.max(s.distance(&p.scale_real(constant)));
    }
    if let Some(p0) = &space.p_zero {
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    max_violation = max_violation.max(p0[i].matmul(&p0[j]).frobenius_norm());
                }
            }
        }
    }

    if max_violation > EQUAL_NORM_TOL {
        return Err(InternalSpaceError::ViolationAboveTolerance {
            max_violation,
            tolerance: EQUAL_NORM_TOL,
        });
    }
    Ok(EqualNormReport {
        species: space.species,
        c: c_val,
        c_prime: cp_val,
        max_violation,
    })
}

/// Largest Frobenius norm of the pairwise anticommutators among
/// `{Q, ΔP_X, ΔP_Y, ΔP_Z}` (fermions) or among the `ΔP_j` alone (bosons).
pub fn max_anticommutator(space: &InternalSpace) -> f64 {
    let mut ops: Vec<&ComplexMatrix> = space.delta_p.iter().collect();
    if space.species == Species::Fermion {
        ops.push(&space.q);
    }
    let mut worst: f64 = 0.0;
    for a in 0..ops.len() {
        for b in (a + 1)..ops.len() {
            worst = worst.max(ops[a].anticommutator(ops[b]).frobenius_norm());
        }
    }
    worst
}

/// Largest `‖P_i^0 P_j^0‖_F` over `i ≠ j`; zero for spaces without `P^0`.
pub fn max_zero_cross_product(space: &InternalSpace) -> f64 {
    let Some(p0) = &space.p_zero else { return 0.0 };
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                worst = worst.max(p0[i].matmul(&p0[j]).frobenius_norm());
            }
        }
    }
    worst
}
