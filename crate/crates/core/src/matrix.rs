//! Dense complex linear algebra for the small operators of the walk and QCA
//! constructions: products, Kronecker products, Hermitian and unitary
//! eigendecompositions, and exponentials of Hermitian generators.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Tolerance on `‖H − H†‖_F` (relative to `max(1, ‖H‖_F)`) accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-13;
/// Tolerance on `‖U†U − I‖_F` accepted as unitary.
pub const UNITARY_TOL: f64 = 1e-12;
/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const CLUSTER_TOL: f64 = 1e-10;

/// Above this dimension `eig_hermitian` switches from cyclic Jacobi to
/// Householder tridiagonalization followed by implicit QL.
const JACOBI_MAX_DIM: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: ‖H − H†‖_F = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not unitary: ‖U†U − I‖_F = {deviation:e}")]
    NotUnitary { deviation: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("eigensolver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("empty matrix")]
    Empty,
}

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Block-diagonal matrix `diag(a, b)`.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let mut m = Self::zeros(a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                m[(i, j)] = a[(i, j)];
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                m[(a.rows + i, a.cols + j)] = b[(i, j)];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[C64]) {
        assert_eq!(v.len(), self.rows);
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise deviation `max |self_ij − other_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in row.iter().enumerate() {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let other_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        &self.matmul(other) + &other.matmul(self)
    }

    /// `‖H − H†‖_F`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `‖U†U − I‖_F`.
    pub fn unitary_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint()
            .matmul(self)
            .distance(&Self::identity(self.rows))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol * self.frobenius_norm().max(1.0)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitary_deviation() <= tol
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>9.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Eigenvalues with unit-norm eigenvectors stored as matrix columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// Phases `arg λ` on the principal branch (−π, π].
    pub fn phases(&self) -> Vec<f64> {
        self.values.iter().map(|&z| principal_arg(z)).collect()
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    /// Rebuilds `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.vectors;
        let scaled = ComplexMatrix::from_fn(v.rows, v.cols, |i, j| v[(i, j)] * self.values[j]);
        scaled.matmul(&v.adjoint())
    }

    /// Largest `‖A v_i − λ_i v_i‖` over all pairs.
    pub fn max_residual(&self, a: &ComplexMatrix) -> f64 {
        (0..self.values.len())
            .map(|j| {
                let v = self.vectors.column(j);
                let av = a.mul_vec(&v);
                av.iter()
                    .zip(&v)
                    .map(|(x, y)| (x - self.values[j] * y).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// `arg z` mapped into (−π, π].
pub fn principal_arg(z: C64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -std::f64::consts::PI {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

fn check_square(m: &ComplexMatrix) -> Result<(), LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if m.rows == 0 {
        return Err(LinalgError::Empty);
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues in ascending
/// order and orthonormal eigenvectors.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<EigenDecomposition, LinalgError> {
    check_square(h)?;
    let deviation = h.hermitian_deviation();
    if deviation > HERMITIAN_TOL * h.frobenius_norm().max(1.0) {
        return Err(LinalgError::NotHermitian { deviation });
    }
    let (values, vectors) = if h.rows <= JACOBI_MAX_DIM {
        jacobi_hermitian(h)?
    } else {
        tridiagonal_ql_hermitian(h)?
    };
    Ok(sorted_decomposition(values, vectors, |a, b| a.re.total_cmp(&b.re)))
}

fn sorted_decomposition(
    values: Vec<C64>,
    vectors: ComplexMatrix,
    cmp: impl Fn(&C64, &C64) -> std::cmp::Ordering,
) -> EigenDecomposition {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| cmp(&values[a], &values[b]));
    let n = vectors.rows;
    let sorted_vectors = ComplexMatrix::from_fn(n, order.len(), |i, j| vectors[(i, order[j])]);
    EigenDecomposition {
        values: order.iter().map(|&k| values[k]).collect(),
        vectors: sorted_vectors,
    }
}

/// Cyclic complex Jacobi. Each rotation first removes the phase of the
/// pivot, then applies a real plane rotation that zeroes it.
pub(crate) fn jacobi_hermitian(
    h: &ComplexMatrix,
) -> Result<(Vec<C64>, ComplexMatrix), LinalgError> {
    const MAX_SWEEPS: usize = 100;
    let n = h.rows;
    let mut a = h.clone();
    // Symmetrize so the updates act on an exactly Hermitian array.
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _sweep in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            let values = (0..n).map(|i| C64::new(a[(i, i)].re, 0.0)).collect();
            return Ok((values, v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 || mag <= 1e-18 * scale {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.is_infinite() {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = [[c, s], [-s·conj(phase), c·conj(phase)]] on columns (p, q).
                let ph = phase.conj();
                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = arp * c - arq * ph * s;
                    a[(r, q)] = arp * s + arq * ph * c;
                }
                for r in 0..n {
                    let apr = a[(p, r)];
                    let aqr = a[(q, r)];
                    a[(p, r)] = apr * c - aqr * phase * s;
                    a[(q, r)] = apr * s + aqr * phase * c;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp * c - vrq * ph * s;
                    v[(r, q)] = vrp * s + vrq * ph * c;
                }
            }
        }
    }
    Err(LinalgError::NoConvergence {
        iterations: MAX_SWEEPS,
    })
}

/// Householder reduction to a real symmetric tridiagonal matrix followed by
/// the implicit QL algorithm with Wilkinson-type shifts.
pub(crate) fn tridiagonal_ql_hermitian(
    h: &ComplexMatrix,
) -> Result<(Vec<C64>, ComplexMatrix), LinalgError> {
    let n = h.rows;
    let mut a = h.clone();
    let mut q = ComplexMatrix::identity(n);
    let zero = C64::new(0.0, 0.0);

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x: Vec<C64> = (0..m).map(|i| a[(k + 1 + i, k)]).collect();
        // Scale before squaring so tiny columns do not underflow.
        let xmax = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if xmax == 0.0 || x[1..].iter().all(|z| *z == zero) {
            continue;
        }
        let x: Vec<C64> = x.iter().map(|z| z / xmax).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let alpha = alpha * xmax;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= vnorm;
        }
        // Trailing block B ← H B H with H = I − 2 v v†.
        let p: Vec<C64> = (0..m)
            .map(|i| (0..m).map(|j| a[(k + 1 + i, k + 1 + j)] * v[j]).sum())
            .collect();
        let kk: C64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let w: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - kk * vi).collect();
        for i in 0..m {
            for j in 0..m {
                let upd = v[i] * w[j].conj() + w[i] * v[j].conj();
                a[(k + 1 + i, k + 1 + j)] -= upd * 2.0;
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in 1..m {
            a[(k + 1 + i, k)] = zero;
            a[(k, k + 1 + i)] = zero;
        }
        // Q ← Q H on columns k+1..n.
        for r in 0..n {
            let dot: C64 = (0..m).map(|j| q[(r, k + 1 + j)] * v[j]).sum();
            for j in 0..m {
                q[(r, k + 1 + j)] -= dot * v[j].conj() * 2.0;
            }
        }
    }

    // Remove the phases of the sub-diagonal so the tridiagonal is real.
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut phase = C64::new(1.0, 0.0);
    for k in 0..n {
        d[k] = a[(k, k)].re;
        if k > 0 {
            let sub = a[(k, k - 1)];
            let mag = sub.norm();
            if mag > 0.0 {
                phase *= sub / mag;
            }
            e[k - 1] = mag;
            for r in 0..n {
                q[(r, k)] *= phase;
            }
        }
    }

    tql2(&mut d, &mut e, &mut q)?;
    Ok((d.into_iter().map(|x| C64::new(x, 0.0)).collect(), q))
}

/// Implicit QL on a real symmetric tridiagonal matrix (diagonal `d`,
/// sub-diagonal `e[0..n-1]`), accumulating rotations into the columns of `z`.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut ComplexMatrix) -> Result<(), LinalgError> {
    const MAX_ITER: usize = 60;
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        let mut iter = 0;
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = (d[m].abs() + d[m + 1].abs()).max(tst1);
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_ITER {
                return Err(LinalgError::NoConvergence { iterations: iter });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..z.rows {
                    let zk1 = z[(k, i + 1)];
                    let zk = z[(k, i)];
                    z[(k, i + 1)] = zk * s + zk1 * c;
                    z[(k, i)] = zk * c - zk1 * s;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigendecomposition of a unitary matrix. Eigenvalues lie on the unit
/// circle and are ordered by phase; the eigenvector matrix is unitary, so
/// degenerate clusters come out orthonormal.
pub fn eig_unitary(u: &ComplexMatrix) -> Result<EigenDecomposition, LinalgError> {
    check_square(u)?;
    let deviation = u.unitary_deviation();
    if deviation > UNITARY_TOL {
        return Err(LinalgError::NotUnitary { deviation });
    }
    let (t, q) = complex_schur(u)?;
    let values: Vec<C64> = (0..u.rows).map(|i| t[(i, i)]).collect();
    Ok(sorted_decomposition(values, q, |a, b| {
        principal_arg(*a).total_cmp(&principal_arg(*b))
    }))
}

/// Complex Schur form `A = Q T Q†` via Householder reduction to Hessenberg
/// form and single-shift QR with Wilkinson shifts. For normal input `T` is
/// diagonal up to rounding and the columns of `Q` are eigenvectors.
pub(crate) fn complex_schur(
    m: &ComplexMatrix,
) -> Result<(ComplexMatrix, ComplexMatrix), LinalgError> {
    let n = m.rows;
    let mut h = m.clone();
    let mut q = ComplexMatrix::identity(n);
    let zero = C64::new(0.0, 0.0);

    // Hessenberg reduction.
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x: Vec<C64> = (0..len).map(|i| h[(k + 1 + i, k)]).collect();
        if x[1..].iter().all(|z| *z == zero) {
            continue;
        }
        let xmax = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let x: Vec<C64> = x.iter().map(|z| z / xmax).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= vnorm;
        }
        // H ← P H P with P = I − 2 v v† acting on rows/cols k+1..n.
        for j in 0..n {
            let dot: C64 = (0..len).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..len {
                h[(k + 1 + i, j)] -= v[i] * dot * 2.0;
            }
        }
        for i in 0..n {
            let dot: C64 = (0..len).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..len {
                h[(i, k + 1 + j)] -= dot * v[j].conj() * 2.0;
            }
        }
        for i in 0..n {
            let dot: C64 = (0..len).map(|j| q[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..len {
                q[(i, k + 1 + j)] -= dot * v[j].conj() * 2.0;
            }
        }
        for i in 1..len {
            h[(k + 1 + i, k)] = zero;
        }
    }

    // Shifted QR on the active window [lo, hi].
    const MAX_ITER_PER_EIGENVALUE: usize = 60;
    let mut hi = n.saturating_sub(1);
    let mut iter = 0;
    let mut total_iter = 0;
    while hi > 0 {
        // Find the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == 0.0 { 1.0 } else { s };
            if h[(lo, lo - 1)].norm() <= f64::EPSILON * s {
                h[(lo, lo - 1)] = zero;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total_iter += 1;
        if iter > MAX_ITER_PER_EIGENVALUE {
            return Err(LinalgError::NoConvergence {
                iterations: total_iter,
            });
        }
        let shift = if iter % 11 == 0 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + C64::new(h[(hi, hi - 1)].norm(), 0.0) * 0.75
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        // QR step on the window via Givens rotations: H − σI = QR, H ← RQ + σI.
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..=hi {
            h[(k, k)] -= shift;
        }
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rotations.push((c, s));
            // Rows k, k+1 for columns k..n.
            for j in k..n {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + b * s;
                h[(k + 1, j)] = -a * s.conj() + b * c;
            }
        }
        for (idx, k) in (lo..hi).enumerate() {
            let (c, s) = rotations[idx];
            // Columns k, k+1 for rows 0..=min(k+2, hi) plus everything above lo.
            let row_end = (k + 2).min(hi);
            for i in 0..=row_end {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = -a * s + b * c;
            }
            for i in 0..n {
                let a = q[(i, k)];
                let b = q[(i, k + 1)];
                q[(i, k)] = a * c + b * s.conj();
                q[(i, k + 1)] = -a * s + b * c;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += shift;
        }
    }
    Ok((h, q))
}

/// Rotation `[[c, s], [−s̄, c]]` (c real) mapping `(a, b)` to `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr * 0.25 - det).sqrt();
    let half = tr * 0.5;
    let l1 = half + disc;
    let l2 = half - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// `exp(i·scale·g)` for Hermitian `g`, computed as `V diag(e^{i·scale·λ}) V†`.
pub fn exp_i_generator(g: &ComplexMatrix, scale: f64) -> Result<ComplexMatrix, LinalgError> {
    let eig = eig_hermitian(g)?;
    let phases: Vec<C64> = eig
        .values
        .iter()
        .map(|l| C64::from_polar(1.0, scale * l.re))
        .collect();
    Ok(EigenDecomposition {
        values: phases,
        vectors: eig.vectors,
    }
    .reconstruct())
}

/// Groups sorted real values into clusters whose neighbours differ by at
/// most `tol`; returns index ranges.
pub fn degenerate_clusters(sorted: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || (sorted[i] - sorted[i - 1]).abs() > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Angular distance between two phases, in [0, π].
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let d = (a - b).rem_euclid(two_pi);
    d.min(two_pi - d)
}

/// Distance between two multisets of phases on the circle: both are sorted
/// and the best cyclic alignment is taken, so the branch cut at ±π does not
/// matter. Returns the largest angular mismatch of that alignment.
pub fn phase_multiset_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets of different size");
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let norm = |x: &f64| x.rem_euclid(2.0 * std::f64::consts::PI);
    let mut sa: Vec<f64> = a.iter().map(norm).collect();
    let mut sb: Vec<f64> = b.iter().map(norm).collect();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    (0..n)
        .map(|shift| {
            (0..n)
                .map(|i| angular_distance(sa[i], sb[(i + shift) % n]))
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// How far a phase multiset is from being symmetric under `φ → −φ`.
pub fn negation_symmetry_defect(phases: &[f64]) -> f64 {
    let negated: Vec<f64> = phases.iter().map(|p| -p).collect();
    phase_multiset_distance(phases, &negated)
}
