//! Momentum-block dynamics of the walks and of the bosonic 3D QCA.
//!
//! By translation invariance the walk unitary splits into `D × D` blocks
//! `U_k = e^{−iθQ} e^{i k_X Δx ΔP_X} e^{i k_Y Δx ΔP_Y} e^{i k_Z Δx ΔP_Z}`.
//! The bosonic QCA built from quadratic couplings reduces on each momentum
//! to a `3 × 3` (or doubled `6 × 6`) unitary `exp{iCᵀ}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::internal_space::{self, Axis, InternalSpace, Species};
use crate::matrix::{eig_unitary, exp_i_generator, ComplexMatrix, LinalgError, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentumError {
    #[error("theta must be zero for boson species (got {0})")]
    ThetaNonzeroForBoson(f64),
    #[error("momentum component {component} = {value} lies outside (−π/Δx, π/Δx]")]
    OutsideBrillouinZone { component: char, value: f64 },
    #[error("lattice spacing and time step must be positive (dx = {dx}, dt = {dt})")]
    InvalidSpacing { dx: f64, dt: f64 },
    #[error("momentum is zero")]
    ZeroMomentum,
    #[error("G = {0} lies outside [−2, 2]")]
    GOutOfRange(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Walk parameters: internal space, mass angle and lattice/time spacings.
#[derive(Clone, Debug)]
pub struct WalkConfig {
    pub space: InternalSpace,
    pub theta: f64,
    pub dx: f64,
    pub dt: f64,
}

impl WalkConfig {
    pub fn new(space: InternalSpace, theta: f64, dx: f64, dt: f64) -> Result<Self, MomentumError> {
        let cfg = Self {
            space,
            theta,
            dx,
            dt,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Unit spacings, `c = 1`.
    pub fn unit(space: InternalSpace, theta: f64) -> Result<Self, MomentumError> {
        Self::new(space, theta, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<(), MomentumError> {
        if !(self.dx > 0.0 && self.dt > 0.0) {
            return Err(MomentumError::InvalidSpacing {
                dx: self.dx,
                dt: self.dt,
            });
        }
        if self.space.species.is_boson() && self.theta != 0.0 {
            return Err(MomentumError::ThetaNonzeroForBoson(self.theta));
        }
        Ok(())
    }

    /// Speed of light `c = Δx/Δt`.
    pub fn c(&self) -> f64 {
        self.dx / self.dt
    }

    /// Mass `m = θ/(Δt c²)`.
    pub fn mass(&self) -> f64 {
        self.theta / (self.dt * self.c() * self.c())
    }
}

/// A lattice momentum `(k_X, k_Y, k_Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentumPoint {
    pub kx: f64,
    pub ky: f64,
    pub kz: f64,
}

impl MomentumPoint {
    pub const ZERO: Self = Self {
        kx: 0.0,
        ky: 0.0,
        kz: 0.0,
    };

    pub fn new(kx: f64, ky: f64, kz: f64) -> Self {
        Self { kx, ky, kz }
    }

    pub fn from_array(k: [f64; 3]) -> Self {
        Self::new(k[0], k[1], k[2])
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.kx, self.ky, self.kz]
    }

    pub fn norm(&self) -> f64 {
        (self.kx * self.kx + self.ky * self.ky + self.kz * self.kz).sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.kx * s, self.ky * s, self.kz * s)
    }

    pub fn component(&self, axis: Axis) -> f64 {
        self.as_array()[axis.index()]
    }

    /// Checks `−π/Δx < k_j ≤ π/Δx` for each component.
    pub fn check_brillouin(&self, dx: f64) -> Result<(), MomentumError> {
        let bound = PI / dx;
        for (component, value) in ['x', 'y', 'z'].into_iter().zip(self.as_array()) {
            if !(value > -bound && value <= bound) {
                return Err(MomentumError::OutsideBrillouinZone { component, value });
            }
        }
        Ok(())
    }
}

/// Sorted eigenphases of `U_k` with matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct DispersionResult {
    pub phases: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// `U_k` for the given walk. Bosons omit the mass factor.
pub fn walk_unitary_at_k(cfg: &WalkConfig, k: MomentumPoint) -> Result<ComplexMatrix, MomentumError> {
    cfg.validate()?;
    k.check_brillouin(cfg.dx)?;
    let space = &cfg.space;
    let mut u = if space.species == Species::Fermion {
        exp_i_generator(&space.q, -cfg.theta)?
    } else {
        ComplexMatrix::identity(space.dim)
    };
    for (axis, kj) in k.as_array().into_iter().enumerate() {
        u = u.matmul(&exp_i_generator(&space.delta_p[axis], kj * cfg.dx)?);
    }
    Ok(u)
}

/// Eigenphases of `U_k` in ascending order.
pub fn dispersion(cfg: &WalkConfig, k: MomentumPoint) -> Result<DispersionResult, MomentumError> {
    let u = walk_unitary_at_k(cfg, k)?;
    let eig = eig_unitary(&u)?;
    Ok(DispersionResult {
        phases: eig.phases(),
        vectors: eig.vectors,
    })
}

/// `k·J` for spin-1 `J`.
pub fn k_dot_j(k: MomentumPoint) -> ComplexMatrix {
    let j = internal_space::spin1_matrices();
    let mut out = ComplexMatrix::zeros(3, 3);
    for (axis, kj) in k.as_array().into_iter().enumerate() {
        out = &out + &j[axis].scale_real(kj);
    }
    out
}

/// Effective photon Hamiltonian `H = c σ_Z ⊗ (k·J)`.
pub fn effective_hamiltonian(k: MomentumPoint, c: f64) -> ComplexMatrix {
    crate::matrix::kron(&internal_space::pauli_z(), &k_dot_j(k)).scale_real(c)
}

pub type Vec3 = [C64; 3];

fn cross(a: [f64; 3], v: &Vec3) -> Vec3 {
    [
        v[2] * a[1] - v[1] * a[2],
        v[0] * a[2] - v[2] * a[0],
        v[1] * a[0] - v[0] * a[1],
    ]
}

fn rotate_real(r: &[[f64; 3]; 3], v: &Vec3) -> Vec3 {
    std::array::from_fn(|i| (0..3).map(|j| v[j] * r[i][j]).sum())
}

/// Rotation matrix taking the unit vector `x̂` to the unit vector `n`.
fn rotation_from_x(n: [f64; 3]) -> [[f64; 3]; 3] {
    // Axis x̂ × n = (0, −n_z, n_y), cos = n_x.
    let (s2, cth) = (n[1] * n[1] + n[2] * n[2], n[0]);
    if s2 < 1e-30 {
        return if cth > 0.0 {
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        } else {
            [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]
        };
    }
    let sth = s2.sqrt();
    let u = [0.0, -n[2] / sth, n[1] / sth];
    let vers = 1.0 - cth;
    let mut r = [[0.0; 3]; 3];
    let skew = [[0.0, -u[2], u[1]], [u[2], 0.0, -u[0]], [-u[1], u[0], 0.0]];
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            r[i][j] = cth * delta + sth * skew[i][j] + vers * u[i] * u[j];
        }
    }
    r
}

/// Eigenvectors of `k·J`: the longitudinal `v₀ = k/|k|` and the transverse
/// `v_±` with `(k·J) v_± = ±|k| v_±`, equivalently `k × v_± = ∓i|k| v_±`.
///
/// Along the ray `k ∥ ŷ` the closed-form normalisation vanishes; there the
/// basis for `k ∥ x̂` is rotated onto `k̂`.
pub fn polarization_basis(k: MomentumPoint) -> Result<(Vec3, Vec3, Vec3), MomentumError> {
    let kn = k.norm();
    if kn == 0.0 {
        return Err(MomentumError::ZeroMomentum);
    }
    let [kx, ky, kz] = k.as_array();
    let re = |x: f64| C64::new(x, 0.0);
    let v0 = [re(kx / kn), re(ky / kn), re(kz / kn)];
    let rho2 = kx * kx + kz * kz;
    if rho2 < 1e-12 * kn * kn {
        let r = rotation_from_x([kx / kn, ky / kn, kz / kn]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let vp = [re(0.0), re(h), C64::new(0.0, h)];
        let vm = [re(0.0), re(h), C64::new(0.0, -h)];
        return Ok((v0, rotate_real(&r, &vp), rotate_real(&r, &vm)));
    }
    let norm = 1.0 / (2.0 * kn * kn * rho2).sqrt();
    let vec = |sign: f64| -> Vec3 {
        [
            C64::new(-sign * kx * ky, -kn * kz) * norm,
            re(sign * rho2 * norm),
            C64::new(-sign * ky * kz, kn * kx) * norm,
        ]
    };
    Ok((v0, vec(1.0), vec(-1.0)))
}

fn norm3(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Plane-wave check of the photon Schrödinger equation against its curl
/// form. With `Ψ₊ = a₊v₊ + a₋v₋` and `Ψ₋ = Ψ₊*`, the time derivative is
/// taken spectrally (each polarization component oscillates at its energy
/// `±|k|`, `c = 1`) and compared with `(i k × Ψ₊, −i k × Ψ₋)`. Returns the
/// mismatch relative to `‖Ψ‖`; zero amplitudes give 0.
pub fn maxwell_residual(
    k: MomentumPoint,
    amplitude_plus: Complex64,
    amplitude_minus: Complex64,
) -> Result<f64, MomentumError> {
    let (_, vp, vm) = polarization_basis(k)?;
    let kn = k.norm();
    let ka = k.as_array();
    let up_p: Vec3 = std::array::from_fn(|i| amplitude_plus * vp[i]);
    let up_m: Vec3 = std::array::from_fn(|i| amplitude_minus * vm[i]);
    let psi_plus: Vec3 = std::array::from_fn(|i| up_p[i] + up_m[i]);
    let psi_minus: Vec3 = std::array::from_fn(|i| psi_plus[i].conj());

    // Energies: v₊ and v₊* carry +|k|, v₋ and v₋* carry −|k|.
    let lhs_upper: Vec3 = std::array::from_fn(|i| (up_p[i] - up_m[i]) * kn);
    let lhs_lower: Vec3 = std::array::from_fn(|i| (up_p[i].conj() - up_m[i].conj()) * kn);

    let i = C64::new(0.0, 1.0);
    let rhs_upper: Vec3 = cross(ka, &psi_plus).map(|z| z * i);
    let rhs_lower: Vec3 = cross(ka, &psi_minus).map(|z| -z * i);

    let total = (norm3(&psi_plus).powi(2) + norm3(&psi_minus).powi(2)).sqrt();
    if total == 0.0 {
        return Ok(0.0);
    }
    let diff: Vec<C64> = lhs_upper
        .iter()
        .zip(&rhs_upper)
        .chain(lhs_lower.iter().zip(&rhs_lower))
        .map(|(a, b)| a - b)
        .collect();
    Ok(norm3(&diff) / total)
}

/// The factors `(e^{iA_jᵀ}, e^{iB_jᵀ})` of the bosonic QCA for one axis, in
/// the spin-1 eigenbasis convention.
pub fn qca_ab_factors(axis: Axis, k: MomentumPoint, dx: f64) -> (ComplexMatrix, ComplexMatrix) {
    let phi = k.component(axis) * dx;
    let (s, co) = phi.sin_cos();
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match axis {
        Axis::X => (
            ComplexMatrix::from_rows(&[
                vec![one, z, z],
                vec![z, -i * co, i * s],
                vec![z, i * s, i * co],
            ]),
            ComplexMatrix::diagonal(&[one, -i, i]),
        ),
        Axis::Y => (
            ComplexMatrix::from_rows(&[
                vec![i * co, z, -i * s],
                vec![z, one, z],
                vec![-i * s, z, -i * co],
            ]),
            ComplexMatrix::diagonal(&[i, one, -i]),
        ),
        Axis::Z => (
            ComplexMatrix::from_rows(&[
                vec![-i * co, i * s, z],
                vec![i * s, i * co, z],
                vec![z, z, one],
            ]),
            ComplexMatrix::diagonal(&[-i, i, one]),
        ),
    }
}

fn six_factor_product(k: MomentumPoint, dx: f64) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(3);
    for axis in internal_space::AXES {
        let (a, b) = qca_ab_factors(axis, k, dx);
        out = out.matmul(&b).matmul(&a);
    }
    out
}

/// `exp{iCᵀ} = e^{iB_xᵀ}e^{iA_xᵀ}e^{iB_yᵀ}e^{iA_yᵀ}e^{iB_zᵀ}e^{iA_zᵀ}`.
///
/// The doubled version substitutes `J_j → σ_Z ⊗ J_j`. On the lower block
/// this flips the sign of every generator, and each per-axis factor
/// `exp{∓i(π ± k_jΔx)J_j}` becomes its counterpart at `−k`, so the result
/// is `diag(C(k), C(−k))`.
pub fn qca_c_matrix(k: MomentumPoint, dx: f64, doubled: bool) -> ComplexMatrix {
    let upper = six_factor_product(k, dx);
    if doubled {
        ComplexMatrix::block_diag(&upper, &six_factor_product(k.scaled(-1.0), dx))
    } else {
        upper
    }
}

/// The closed-form product matrix in terms of `c_j = cos(k_jΔx)`,
/// `s_j = sin(k_jΔx)`.
pub fn qca_c_closed_form(k: MomentumPoint, dx: f64) -> ComplexMatrix {
    let (sx, cx) = (k.kx * dx).sin_cos();
    let (sy, cy) = (k.ky * dx).sin_cos();
    let (sz, cz) = (k.kz * dx).sin_cos();
    ComplexMatrix::from_real_rows(&[
        vec![cy * cz, -cy * sz, sy],
        vec![cx * sz + sx * sy * cz, cx * cz - sx * sy * sz, -sx * cy],
        vec![sx * sz - cx * sy * cz, sx * cz + cx * sy * sz, cx * cy],
    ])
}

/// `G = c_xc_y + c_yc_z + c_zc_x − s_xs_ys_z − 1`, so that the nontrivial
/// eigenvalues of `exp{iCᵀ}` are `G/2 ∓ i√(1 − G²/4)`.
pub fn qca_g(k: MomentumPoint, dx: f64) -> f64 {
    let (sx, cx) = (k.kx * dx).sin_cos();
    let (sy, cy) = (k.ky * dx).sin_cos();
    let (sz, cz) = (k.kz * dx).sin_cos();
    cx * cy + cy * cz + cz * cx - sx * sy * sz - 1.0
}

/// `2 − G` and `2 + G` computed from half-angle sines, which keeps full
/// relative accuracy of `2 − G` at small `kΔx`.
fn g_margins(k: MomentumPoint, dx: f64) -> (f64, f64) {
    let h = |x: f64| (x * dx * 0.5).sin().powi(2);
    let (ax, ay, az) = (h(k.kx), h(k.ky), h(k.kz));
    let sxyz = (k.kx * dx).sin() * (k.ky * dx).sin() * (k.kz * dx).sin();
    // c_i = 1 − 2a_i.
    let two_minus_g = 4.0 * (ax + ay + az) - 4.0 * (ax * ay + ay * az + az * ax) + sxyz;
    (two_minus_g, 4.0 - two_minus_g)
}

/// Closed-form eigenphases `(φ₀, φ₊, φ₋) = (0, arccos(G/2), −arccos(G/2))`,
/// with `λ₊ = e^{−iφ₊}` and `λ₋ = e^{−iφ₋}`.
pub fn qca_c_eigenphases(k: MomentumPoint, dx: f64) -> Result<(f64, f64, f64), MomentumError> {
    let (two_minus_g, two_plus_g) = g_margins(k, dx);
    let g = 2.0 - two_minus_g;
    if g.abs() > 2.0 + 1e-12 {
        return Err(MomentumError::GOutOfRange(g));
    }
    let phi = 2.0 * (two_minus_g.max(0.0) / 4.0)
        .sqrt()
        .atan2((two_plus_g.max(0.0) / 4.0).sqrt());
    Ok((0.0, phi, -phi))
}

/// `exp(−i k·J Δx)`, the long-wavelength form of `exp{iCᵀ}`.
pub fn qca_long_wavelength(k: MomentumPoint, dx: f64) -> Result<ComplexMatrix, MomentumError> {
    Ok(exp_i_generator(&k_dot_j(k), -dx)?)
}
