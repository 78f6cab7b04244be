//! Toeplitz structure of the residual negative-energy coupling.
//!
//! The entries of `D̄` depend only on `n = j − j′`: `sin(πn/2) / (N sin(πn/N))`
//! on a lattice of `N` sites, tending to the symbol `f(n)` as `N → ∞`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;
use thiserror::Error;

use crate::matrix::{eig_hermitian, ComplexMatrix, LinalgError, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToeplitzError {
    #[error("range M = {0} must be even")]
    OddRange(usize),
    #[error("lattice size N = {n} must be even and exceed 2M = {two_m}")]
    LatticeTooSmall { n: usize, two_m: usize },
    #[error("operation needs a finite lattice size")]
    InfiniteLattice,
    #[error("profile vectors must have length M + 1 = {expected} (got {got})")]
    ProfileLength { expected: usize, got: usize },
    #[error("profile entries must be finite")]
    NonFinite,
    #[error("terms must be at least 1")]
    NoTerms,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Lattice size used for the matrix entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LatticeSize {
    Finite(usize),
    Infinite,
}

/// An `(M+1)×(M+1)` coupling matrix on a lattice of size `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ToeplitzSpec {
    pub m: usize,
    pub n: LatticeSize,
}

impl ToeplitzSpec {
    pub fn infinite(m: usize) -> Self {
        Self {
            m,
            n: LatticeSize::Infinite,
        }
    }

    pub fn finite(m: usize, n: usize) -> Self {
        Self {
            m,
            n: LatticeSize::Finite(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.m + 1
    }

    pub fn validate(&self) -> Result<(), ToeplitzError> {
        if self.m % 2 != 0 {
            return Err(ToeplitzError::OddRange(self.m));
        }
        if let LatticeSize::Finite(n) = self.n {
            if n <= 2 * self.m || n % 2 != 0 {
                return Err(ToeplitzError::LatticeTooSmall { n, two_m: 2 * self.m });
            }
        }
        Ok(())
    }

    fn finite_n(&self) -> Result<usize, ToeplitzError> {
        match self.n {
            LatticeSize::Finite(n) => Ok(n),
            LatticeSize::Infinite => Err(ToeplitzError::InfiniteLattice),
        }
    }
}

/// `f(0) = 1/2`, `f(n) = 0` for even `n ≠ 0`, `f(n) = (−1)^{(n−1)/2}/(nπ)` for odd `n`.
pub fn symbol_f(n: i64) -> f64 {
    let n = n.unsigned_abs();
    if n == 0 {
        0.5
    } else if n % 2 == 0 {
        0.0
    } else {
        let sign = if (n - 1) / 2 % 2 == 0 { 1.0 } else { -1.0 };
        sign / (n as f64 * PI)
    }
}

/// Entry of `D̄` at offset `n = j − j′`.
pub fn dbar_entry(n: i64, size: LatticeSize) -> f64 {
    match size {
        LatticeSize::Infinite => symbol_f(n),
        LatticeSize::Finite(big_n) => {
            if n == 0 {
                return 0.5;
            }
            if n % 2 == 0 {
                return 0.0;
            }
            let nf = n as f64;
            let num = if (n.rem_euclid(4)) == 1 { 1.0 } else { -1.0 };
            num / (big_n as f64 * (PI * nf / big_n as f64).sin())
        }
    }
}

/// Rows of the real symmetric Toeplitz matrix `D̄`.
pub fn dbar_rows(spec: &ToeplitzSpec) -> Result<Vec<Vec<f64>>, ToeplitzError> {
    spec.validate()?;
    let d = spec.dim();
    Ok((0..d)
        .map(|j| (0..d).map(|jp| dbar_entry(j as i64 - jp as i64, spec.n)).collect())
        .collect())
}

/// `D̄` as a (real-valued) complex matrix.
pub fn dbar_matrix(spec: &ToeplitzSpec) -> Result<ComplexMatrix, ToeplitzError> {
    Ok(ComplexMatrix::from_real_rows(&dbar_rows(spec)?))
}

/// Phase carried by `D` relative to `D̄` at offset `n`: `e^{−iπn(N+2)/(2N)}`.
pub fn d_phase(n: i64, big_n: usize) -> C64 {
    let angle = -PI * n as f64 * (big_n as f64 + 2.0) / (2.0 * big_n as f64);
    C64::from_polar(1.0, angle)
}

/// The Hermitian matrix `d_{jj′} = N^{−1} Σ_{ℓ=1}^{N/2} e^{−2iπ(j−j′)ℓ/N}` in closed form.
pub fn d_complex_matrix(spec: &ToeplitzSpec) -> Result<ComplexMatrix, ToeplitzError> {
    spec.validate()?;
    let big_n = spec.finite_n()?;
    let d = spec.dim();
    Ok(ComplexMatrix::from_fn(d, d, |j, jp| {
        let n = j as i64 - jp as i64;
        d_phase(n, big_n) * dbar_entry(n, spec.n)
    }))
}

/// Partial Fourier sum `f̃(k) = 1/2 + Σ_{odd n ≤ terms} 2 f(n) cos(nk)`.
pub fn f_tilde(k: f64, terms: usize) -> Result<f64, ToeplitzError> {
    if terms == 0 {
        return Err(ToeplitzError::NoTerms);
    }
    // Summed from the smallest terms upward to limit cancellation error.
    let last_odd = if terms % 2 == 1 { terms } else { terms - 1 };
    let mut acc = 0.0;
    let mut n = last_odd;
    loop {
        acc += 2.0 * symbol_f(n as i64) * (n as f64 * k).cos();
        if n == 1 {
            break;
        }
        n -= 2;
    }
    Ok(0.5 + acc)
}

/// The limit of `f̃(k)`: `1` for `|k| < π/2`, `0` for `π/2 < |k| ≤ π`, `1/2` at the jump.
pub fn f_tilde_limit(k: f64) -> f64 {
    let k = k.abs();
    if (k - FRAC_PI_2).abs() < f64::EPSILON {
        0.5
    } else if k < FRAC_PI_2 {
        1.0
    } else {
        0.0
    }
}

/// Coupling coefficients `α_{y,±}` for offsets `y = −M/2, …, M/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingProfile {
    pub v_plus: Vec<C64>,
    pub v_minus: Vec<C64>,
}

impl CouplingProfile {
    pub fn zeros(m: usize) -> Self {
        Self {
            v_plus: vec![C64::new(0.0, 0.0); m + 1],
            v_minus: vec![C64::new(0.0, 0.0); m + 1],
        }
    }

    pub fn validate(&self, spec: &ToeplitzSpec) -> Result<(), ToeplitzError> {
        for v in [&self.v_plus, &self.v_minus] {
            if v.len() != spec.dim() {
                return Err(ToeplitzError::ProfileLength {
                    expected: spec.dim(),
                    got: v.len(),
                });
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(ToeplitzError::NonFinite);
            }
        }
        Ok(())
    }
}

fn quadratic_form(a: &ComplexMatrix, v: &[C64]) -> C64 {
    v.iter().zip(a.mul_vec(v)).map(|(x, y)| x.conj() * y).sum()
}

/// Total weight on negative-energy modes, `v₋†D*v₋ + v₊†Dv₊`.
///
/// Negative energy sits on the `−` branch for `k = 2πℓ/N`, `ℓ = 1..N/2`
/// (summed by `D*`) and on the `+` branch for the mirrored momenta
/// (summed by `D`).
pub fn negative_coupling(profile: &CouplingProfile, spec: &ToeplitzSpec) -> Result<f64, ToeplitzError> {
    profile.validate(spec)?;
    let d = d_complex_matrix(spec)?;
    let value = quadratic_form(&d.conj(), &profile.v_minus) + quadratic_form(&d, &profile.v_plus);
    Ok(value.re)
}

/// Direct evaluation of `Σ_k |α̃_{k,neg}|²` over the momentum grid, with
/// `α̃_{k,neg} = N^{−1/2} Σ_y e^{−i(x+y)k} α_{y,s(k)}`.
pub fn momentum_space_coupling(
    profile: &CouplingProfile,
    spec: &ToeplitzSpec,
    x: i64,
) -> Result<f64, ToeplitzError> {
    spec.validate()?;
    profile.validate(spec)?;
    let big_n = spec.finite_n()?;
    let half = (spec.m / 2) as i64;
    let norm = (big_n as f64).sqrt();
    let mut total = 0.0;
    for l in 1..=(big_n / 2) as i64 {
        for (sign, coeffs) in [(1.0, &profile.v_minus), (-1.0, &profile.v_plus)] {
            let k = sign * 2.0 * PI * l as f64 / big_n as f64;
            let amp: C64 = coeffs
                .iter()
                .enumerate()
                .map(|(j, a)| {
                    let y = j as i64 - half;
                    C64::from_polar(1.0, -((x + y) as f64) * k) * a
                })
                .sum();
            total += (amp / norm).norm_sqr();
        }
    }
    Ok(total)
}

/// Eigenvalues of `D̄` in double precision, ascending.
pub fn dbar_eigenvalues(spec: &ToeplitzSpec) -> Result<Vec<f64>, ToeplitzError> {
    Ok(eig_hermitian(&dbar_matrix(spec)?)?.real_values())
}

/// Frobenius norm of `D̄_N − D̄_∞`.
pub fn finite_size_correction(m: usize, n: usize) -> Result<f64, ToeplitzError> {
    let finite = dbar_matrix(&ToeplitzSpec::finite(m, n))?;
    let limit = dbar_matrix(&ToeplitzSpec::infinite(m))?;
    Ok(finite.distance(&limit))
}
