//! Symmetric eigenproblems in [`BigReal`] arithmetic.
//!
//! [`min_eigpair`] tridiagonalises with Householder reflections, locates the
//! smallest eigenvalue by Sturm-sequence bisection and recovers the
//! eigenvector by inverse iteration on the original matrix.
//! [`jacobi_eigen`] is an independent cyclic Jacobi solver used for
//! cross-checks.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bigreal::{BigReal, BigRealError, MIN_DIGITS};

/// Upper bound on cyclic Jacobi sweeps.
pub const MAX_JACOBI_SWEEPS: usize = 80;
const INVERSE_ITERATION_PASSES: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HighPrecError {
    #[error("M = {m} needs at least {required} digits (got {digits})")]
    PrecisionTooLow { m: usize, digits: u32, required: u32 },
    #[error("matrix is not symmetric (deviation {deviation:e})")]
    NotSymmetric { deviation: f64 },
    #[error("no convergence after {iterations} iterations; increase the precision")]
    NoConvergence { iterations: usize },
    #[error("empty matrix")]
    Empty,
    #[error("M = {0} must be even")]
    OddRange(usize),
    #[error("M values must be ascending")]
    Unsorted,
    #[error("invalid precision policy {0:?}")]
    InvalidPolicy(String),
    #[error(transparent)]
    Arithmetic(#[from] BigRealError),
}

/// Digits needed to resolve `λ_min(D̄_M)`: `⌈0.8 M⌉ + 30`.
pub fn required_digits(m: usize) -> u32 {
    (4 * m as u32).div_ceil(5) + 30
}

/// How the working precision is chosen for each `M`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum PrecisionPolicy {
    /// Exactly [`required_digits`].
    #[default]
    Required,
    /// A fixed number of digits; rejected if below [`required_digits`].
    Fixed(u32),
    /// At least this many digits.
    Min(u32),
}

impl PrecisionPolicy {
    pub fn digits_for(&self, m: usize) -> Result<u32, HighPrecError> {
        let required = required_digits(m);
        match *self {
            PrecisionPolicy::Required => Ok(required),
            PrecisionPolicy::Fixed(d) if d < required => Err(HighPrecError::PrecisionTooLow {
                m,
                digits: d,
                required,
            }),
            PrecisionPolicy::Fixed(d) => Ok(d),
            PrecisionPolicy::Min(d) => Ok(d.max(required)),
        }
    }
}

impl FromStr for PrecisionPolicy {
    type Err = HighPrecError;

    /// Accepts `required`, `fixed:N` or `min:N`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || HighPrecError::InvalidPolicy(s.to_string());
        let s = s.trim();
        if s == "required" {
            return Ok(Self::Required);
        }
        let (kind, n) = s.split_once(':').ok_or_else(bad)?;
        let n: u32 = n.parse().map_err(|_| bad())?;
        match kind {
            "fixed" => Ok(Self::Fixed(n)),
            "min" => Ok(Self::Min(n)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for PrecisionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Required => f.write_str("required"),
            Self::Fixed(n) => write!(f, "fixed:{n}"),
            Self::Min(n) => write!(f, "min:{n}"),
        }
    }
}

/// Dense symmetric matrix with full storage.
#[derive(Clone, Debug, PartialEq)]
pub struct BigSymMatrix {
    n: usize,
    data: Vec<BigReal>,
}

impl BigSymMatrix {
    pub fn zeros(n: usize, digits: u32) -> Self {
        Self {
            n,
            data: vec![BigReal::zero(digits); n * n],
        }
    }

    pub fn from_f64_rows(rows: &[Vec<f64>], digits: u32) -> Result<Self, HighPrecError> {
        let n = rows.len();
        let mut m = Self::zeros(n, digits);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(HighPrecError::NotSymmetric { deviation: f64::INFINITY });
            }
            for (j, &v) in row.iter().enumerate() {
                m.data[i * n + j] = BigReal::from_f64(v, digits)?;
            }
        }
        let dev = m.symmetry_deviation();
        if dev > 0.0 {
            return Err(HighPrecError::NotSymmetric { deviation: dev });
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigReal {
        &self.data[i * self.n + j]
    }

    /// Sets `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: BigReal) {
        self.data[j * self.n + i] = v.clone();
        self.data[i * self.n + j] = v;
    }

    pub fn digits(&self) -> u32 {
        self.data.iter().map(BigReal::digits).min().unwrap_or(MIN_DIGITS)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_f64()).collect())
            .collect()
    }

    /// `max |a_ij − a_ji|` in double precision.
    pub fn symmetry_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..i {
                dev = dev.max((self.get(i, j) - self.get(j, i)).abs().to_f64());
            }
        }
        dev
    }

    /// Maximum absolute row sum, an upper bound on the spectral norm.
    pub fn norm_inf(&self) -> BigReal {
        let d = self.digits();
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(BigReal::zero(d), |acc, j| acc + self.get(i, j).abs())
            })
            .max()
            .unwrap_or_else(|| BigReal::zero(d))
    }

    pub fn mul_vec(&self, v: &[BigReal]) -> Vec<BigReal> {
        let d = self.digits();
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(BigReal::zero(d), |acc, j| acc + self.get(i, j) * &v[j])
            })
            .collect()
    }
}

fn check_symmetric(a: &BigSymMatrix) -> Result<(), HighPrecError> {
    if a.n == 0 {
        return Err(HighPrecError::Empty);
    }
    let tol = 10f64.powi(-(a.digits() as i32) + 5);
    let dev = a.symmetry_deviation();
    if dev > tol * a.norm_inf().to_f64().max(1.0) {
        return Err(HighPrecError::NotSymmetric { deviation: dev });
    }
    Ok(())
}

/// `D̄` for range `M` with entries `f(j − j′)` at `digits` precision.
pub fn build_dbar_bigreal(m: usize, digits: u32) -> Result<BigSymMatrix, HighPrecError> {
    if m % 2 != 0 {
        return Err(HighPrecError::OddRange(m));
    }
    let required = required_digits(m);
    if digits < required {
        return Err(HighPrecError::PrecisionTooLow { m, digits, required });
    }
    let inv_pi = BigReal::pi(digits + 5).recip()?.with_digits(digits);
    let symbol = |n: usize| -> Result<BigReal, BigRealError> {
        Ok(match n {
            0 => BigReal::from_ratio(1, 2, digits)?,
            n if n % 2 == 0 => BigReal::zero(digits),
            n => {
                let sign = if (n - 1) / 2 % 2 == 0 { 1 } else { -1 };
                inv_pi.div(&BigReal::from_i64(sign * n as i64, digits))?
            }
        })
    };
    let values = (0..=m).map(symbol).collect::<Result<Vec<_>, _>>()?;
    let mut a = BigSymMatrix::zeros(m + 1, digits);
    for i in 0..=m {
        for j in 0..=i {
            a.set(i, j, values[i - j].clone());
        }
    }
    Ok(a)
}

/// Symmetric tridiagonal form: diagonal `d` and off-diagonal `e`.
#[derive(Clone, Debug)]
pub struct Tridiagonal {
    pub d: Vec<BigReal>,
    pub e: Vec<BigReal>,
}

/// Householder reduction to tridiagonal form (eigenvalues only).
pub fn tridiagonalize(a: &BigSymMatrix) -> Tridiagonal {
    let n = a.n;
    let digits = a.digits();
    let zero = BigReal::zero(digits);
    let mut m: Vec<Vec<BigReal>> = (0..n).map(|i| (0..n).map(|j| a.get(i, j).clone()).collect()).collect();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<BigReal> = (k + 1..n).map(|i| m[i][k].clone()).collect();
        let norm_x = x.iter().fold(zero.clone(), |acc, v| acc + v * v).sqrt().expect("sum of squares");
        if norm_x.is_zero() {
            continue;
        }
        let alpha = if x[0].is_negative() { norm_x } else { -norm_x };
        let mut v = x;
        v[0] = &v[0] - &alpha;
        let vnorm2 = v.iter().fold(zero.clone(), |acc, t| acc + t * t);
        if vnorm2.is_zero() {
            continue;
        }
        let beta = BigReal::from_i64(2, digits).div(&vnorm2).expect("nonzero");
        let s = n - k - 1;
        // p = β A v, K = β vᵀp / 2, q = p − K v, A ← A − v qᵀ − q vᵀ.
        let p: Vec<BigReal> = (0..s)
            .map(|i| {
                let row = &m[k + 1 + i];
                (0..s).fold(zero.clone(), |acc, j| acc + &row[k + 1 + j] * &v[j]) * beta.clone()
            })
            .collect();
        let vp = v.iter().zip(&p).fold(zero.clone(), |acc, (a, b)| acc + a * b);
        let kk = (&beta * &vp).half();
        let q: Vec<BigReal> = p.iter().zip(&v).map(|(pi, vi)| pi - &(&kk * vi)).collect();
        for i in 0..s {
            for j in 0..=i {
                let upd = &(&v[i] * &q[j]) + &(&q[i] * &v[j]);
                let val = &m[k + 1 + i][k + 1 + j] - &upd;
                m[k + 1 + j][k + 1 + i] = val.clone();
                m[k + 1 + i][k + 1 + j] = val;
            }
        }
        m[k + 1][k] = alpha.clone();
        m[k][k + 1] = alpha;
        for i in k + 2..n {
            m[i][k] = zero.clone();
            m[k][i] = zero.clone();
        }
    }
    Tridiagonal {
        d: (0..n).map(|i| m[i][i].clone()).collect(),
        e: (0..n.saturating_sub(1)).map(|i| m[i + 1][i].clone()).collect(),
    }
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: &BigReal, tiny: &BigReal) -> usize {
        let mut count = 0;
        let mut q = &self.d[0] - x;
        for i in 0.. {
            if q.is_zero() {
                q = tiny.clone();
            }
            if q.is_negative() {
                count += 1;
            }
            if i + 1 == self.d.len() {
                break;
            }
            let e2 = &self.e[i] * &self.e[i];
            q = &(&self.d[i + 1] - x) - &e2.div(&q).expect("q is nonzero");
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (BigReal, BigReal) {
        let n = self.d.len();
        let mut lo: Option<BigReal> = None;
        let mut hi: Option<BigReal> = None;
        for i in 0..n {
            let mut r = BigReal::zero(self.d[i].digits());
            if i > 0 {
                r = r + self.e[i - 1].abs();
            }
            if i + 1 < n {
                r = r + self.e[i].abs();
            }
            let (l, h) = (&self.d[i] - &r, &self.d[i] + &r);
            lo = Some(match lo {
                Some(c) if c <= l => c,
                _ => l,
            });
            hi = Some(match hi {
                Some(c) if c >= h => c,
                _ => h,
            });
        }
        (lo.expect("nonempty"), hi.expect("nonempty"))
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection to an absolute
    /// width of `scale · 2^{−bits}`.
    pub fn kth_eigenvalue(&self, k: usize) -> Result<BigReal, HighPrecError> {
        let digits = self.d.iter().map(BigReal::digits).min().unwrap_or(MIN_DIGITS);
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs());
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as i64;
        let tol = scale.mul_pow2(-bits);
        let tiny = scale.mul_pow2(-2 * bits - 8);
        let max_iter = 4 * bits as usize + 200;
        for _ in 0..max_iter {
            if &hi - &lo <= tol {
                return Ok((&lo + &hi).half());
            }
            let mid = (&lo + &hi).half();
            if mid == lo || mid == hi {
                return Ok(mid);
            }
            if self.count_below(&mid, &tiny) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(HighPrecError::NoConvergence { iterations: max_iter })
    }

    pub fn eigenvalues(&self) -> Result<Vec<BigReal>, HighPrecError> {
        (0..self.d.len()).map(|k| self.kth_eigenvalue(k)).collect()
    }
}

/// Eigenvalues by tridiagonalisation and Sturm bisection, ascending.
pub fn eigenvalues_sturm(a: &BigSymMatrix) -> Result<Vec<BigReal>, HighPrecError> {
    check_symmetric(a)?;
    tridiagonalize(a).eigenvalues()
}

/// Smallest eigenpair with its residual `‖Av − λv‖₂`.
#[derive(Clone, Debug)]
pub struct MinEigResult {
    pub lambda_min: BigReal,
    pub eigenvector: Vec<BigReal>,
    pub residual: BigReal,
    pub digits: u32,
}

fn norm2(v: &[BigReal]) -> BigReal {
    let d = v.iter().map(BigReal::digits).min().unwrap_or(MIN_DIGITS);
    v.iter()
        .fold(BigReal::zero(d), |acc, x| acc + x * x)
        .sqrt()
        .expect("sum of squares")
}

/// LU factors of `A − σI` with partial pivoting.
struct Lu {
    lu: Vec<Vec<BigReal>>,
    perm: Vec<usize>,
}

fn lu_shifted(a: &BigSymMatrix, sigma: &BigReal, tiny: &BigReal) -> Lu {
    let n = a.n;
    let mut lu: Vec<Vec<BigReal>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { a.get(i, j) - sigma } else { a.get(i, j).clone() })
                .collect()
        })
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let piv = (k..n).max_by(|&x, &y| lu[x][k].abs().cmp(&lu[y][k].abs())).expect("nonempty");
        lu.swap(k, piv);
        perm.swap(k, piv);
        if lu[k][k].is_zero() {
            lu[k][k] = tiny.clone();
        }
        let pivot = lu[k][k].clone();
        for i in k + 1..n {
            if lu[i][k].is_zero() {
                continue;
            }
            let f = lu[i][k].div(&pivot).expect("pivot is nonzero");
            for j in k + 1..n {
                let t = &f * &lu[k][j];
                lu[i][j] = &lu[i][j] - &t;
            }
            lu[i][k] = f;
        }
    }
    Lu { lu, perm }
}

impl Lu {
    fn solve(&self, b: &[BigReal]) -> Vec<BigReal> {
        let n = b.len();
        let mut y: Vec<BigReal> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let t = &self.lu[i][j] * &y[j];
                y[i] = &y[i] - &t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = &self.lu[i][j] * &y[j];
                y[i] = &y[i] - &t;
            }
            y[i] = y[i].div(&self.lu[i][i]).expect("pivot is nonzero");
        }
        y
    }
}

/// Residual `‖Av − λv‖₂`.
pub fn eig_residual(a: &BigSymMatrix, lambda: &BigReal, v: &[BigReal]) -> BigReal {
    let av = a.mul_vec(v);
    let r: Vec<BigReal> = av.iter().zip(v).map(|(x, y)| x - &(lambda * y)).collect();
    norm2(&r)
}

/// Smallest eigenvalue and eigenvector of a symmetric matrix.
///
/// The eigenvector is normalised with its largest-magnitude component
/// positive. Fails with `NoConvergence` when the residual exceeds
/// `10^{−(digits−15)}‖A‖`.
pub fn min_eigpair(a: &BigSymMatrix, digits: u32) -> Result<MinEigResult, HighPrecError> {
    let a = if a.digits() == digits {
        a.clone()
    } else {
        BigSymMatrix {
            n: a.n,
            data: a.data.iter().map(|x| x.with_digits(digits)).collect(),
        }
    };
    check_symmetric(&a)?;
    let n = a.n;
    let tri = tridiagonalize(&a);
    let lambda = tri.kth_eigenvalue(0)?;

    let norm = a.norm_inf();
    let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as i64;
    let tiny = norm.clone().max(BigReal::one(digits)).mul_pow2(-bits - 8);
    let lu = lu_shifted(&a, &lambda, &tiny);
    let mut v: Vec<BigReal> = (0..n)
        .map(|i| BigReal::from_ratio((n + i) as i64, n as i64, digits).expect("n > 0"))
        .collect();
    for _ in 0..INVERSE_ITERATION_PASSES {
        let y = lu.solve(&v);
        let ny = norm2(&y);
        if ny.is_zero() {
            return Err(HighPrecError::NoConvergence { iterations: INVERSE_ITERATION_PASSES });
        }
        v = y.iter().map(|x| x.div(&ny).expect("nonzero")).collect();
    }
    let lead = (0..n).max_by(|&i, &j| v[i].abs().cmp(&v[j].abs())).expect("nonempty");
    if v[lead].is_negative() {
        v = v.iter().map(|x| -x).collect();
    }
    let residual = eig_residual(&a, &lambda, &v);
    let bound = norm.clone().max(BigReal::one(digits))
        * BigReal::parse(&format!("1e-{}", digits.saturating_sub(15)), digits)?;
    if residual > bound {
        return Err(HighPrecError::NoConvergence { iterations: INVERSE_ITERATION_PASSES });
    }
    Ok(MinEigResult {
        lambda_min: lambda,
        eigenvector: v,
        residual,
        digits,
    })
}

/// Full spectrum (ascending) and eigenvectors (columns of `vectors`) by
/// cyclic Jacobi rotations.
pub fn jacobi_eigen(a: &BigSymMatrix) -> Result<(Vec<BigReal>, Vec<Vec<BigReal>>), HighPrecError> {
    check_symmetric(a)?;
    let n = a.n;
    let digits = a.digits();
    let zero = BigReal::zero(digits);
    let one = BigReal::one(digits);
    let mut m: Vec<Vec<BigReal>> = (0..n).map(|i| (0..n).map(|j| a.get(i, j).clone()).collect()).collect();
    let mut v: Vec<Vec<BigReal>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { one.clone() } else { zero.clone() }).collect())
        .collect();
    let frob = m.iter().flatten().fold(zero.clone(), |acc, x| acc + x * x).sqrt()?;
    let tol = frob * BigReal::parse(&format!("1e-{}", digits.saturating_sub(10)), digits)?;
    let tol2 = &tol * &tol;

    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut off = zero.clone();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off + &m[i][j] * &m[i][j];
                }
            }
        }
        if off <= tol2 {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&x, &y| m[x][x].cmp(&m[y][y]));
            let values = order.iter().map(|&i| m[i][i].clone()).collect();
            let vectors = (0..n).map(|r| order.iter().map(|&c| v[r][c].clone()).collect()).collect();
            return Ok((values, vectors));
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].is_zero() {
                    continue;
                }
                let apq = m[p][q].clone();
                let theta = (&m[q][q] - &m[p][p]).div(&(&apq + &apq))?;
                let root = (&(&theta * &theta) + &one).sqrt()?;
                let t = if theta.is_negative() {
                    -one.div(&(&theta.abs() + &root))?
                } else {
                    one.div(&(&theta.abs() + &root))?
                };
                let c = (&(&t * &t) + &one).sqrt()?.recip()?;
                let s = &t * &c;
                let tau = s.div(&(&one + &c))?;
                m[p][p] = &m[p][p] - &(&t * &apq);
                m[q][q] = &m[q][q] + &(&t * &apq);
                m[p][q] = zero.clone();
                m[q][p] = zero.clone();
                for r in 0..n {
                    if r != p && r != q {
                        let (g, h) = (m[r][p].clone(), m[r][q].clone());
                        let new_rp = &g - &(&s * &(&h + &(&g * &tau)));
                        let new_rq = &h + &(&s * &(&g - &(&h * &tau)));
                        m[r][p] = new_rp.clone();
                        m[p][r] = new_rp;
                        m[r][q] = new_rq.clone();
                        m[q][r] = new_rq;
                    }
                    let (g, h) = (v[r][p].clone(), v[r][q].clone());
                    v[r][p] = &g - &(&s * &(&h + &(&g * &tau)));
                    v[r][q] = &h + &(&s * &(&g - &(&h * &tau)));
                }
            }
        }
    }
    Err(HighPrecError::NoConvergence { iterations: MAX_JACOBI_SWEEPS })
}

/// One point of the `λ_min(M)` series.
#[derive(Clone, Debug)]
pub struct SeriesPoint {
    pub m: usize,
    pub result: MinEigResult,
}

/// `λ_min(D̄_M)` for each `M`, computed concurrently.
pub fn min_eig_series(m_values: &[usize], policy: PrecisionPolicy) -> Result<Vec<SeriesPoint>, HighPrecError> {
    if m_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HighPrecError::Unsorted);
    }
    m_values
        .par_iter()
        .map(|&m| {
            let digits = policy.digits_for(m)?;
            let a = build_dbar_bigreal(m, digits)?;
            Ok(SeriesPoint {
                m,
                result: min_eigpair(&a, digits)?,
            })
        })
        .collect()
}

/// Largest eigenvalue by Sturm bisection.
pub fn max_eigenvalue(a: &BigSymMatrix) -> Result<BigReal, HighPrecError> {
    check_symmetric(a)?;
    tridiagonalize(a).kth_eigenvalue(a.n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_policy() {
        assert_eq!(required_digits(0), 30);
        assert_eq!(required_digits(60), 78);
        assert_eq!(required_digits(100), 110);
        assert_eq!(required_digits(1), 31);
        assert_eq!(PrecisionPolicy::Min(80).digits_for(60).unwrap(), 80);
        assert_eq!(PrecisionPolicy::Min(80).digits_for(100).unwrap(), 110);
        assert!(PrecisionPolicy::Fixed(40).digits_for(60).is_err());
        assert_eq!("fixed:90".parse::<PrecisionPolicy>().unwrap(), PrecisionPolicy::Fixed(90));
        assert_eq!("min:5".parse::<PrecisionPolicy>().unwrap(), PrecisionPolicy::Min(5));
        assert!("max:5".parse::<PrecisionPolicy>().is_err());
        assert_eq!(PrecisionPolicy::Min(7).to_string(), "min:7");
    }

    #[test]
    fn dbar_entries() {
        let a = build_dbar_bigreal(4, 50).unwrap();
        let pi = std::f64::consts::PI;
        assert_eq!(a.get(0, 0).to_f64(), 0.5);
        assert!((a.get(0, 1).to_f64() - 1.0 / pi).abs() < 1e-17);
        assert!((a.get(0, 3).to_f64() + 1.0 / (3.0 * pi)).abs() < 1e-17);
        assert!(a.get(0, 2).is_zero());
        assert!(matches!(
            build_dbar_bigreal(60, 50),
            Err(HighPrecError::PrecisionTooLow { .. })
        ));
        assert!(build_dbar_bigreal(3, 50).is_err());
    }

    #[test]
    fn m_zero_is_half() {
        let a = build_dbar_bigreal(0, 30).unwrap();
        let r = min_eigpair(&a, 30).unwrap();
        assert_eq!(r.lambda_min, BigReal::from_ratio(1, 2, 30).unwrap());
    }

    #[test]
    fn diagonal_matrix() {
        let rows = vec![vec![3.0, 0.0, 0.0], vec![0.0, -1.0, 0.0], vec![0.0, 0.0, 2.0]];
        let a = BigSymMatrix::from_f64_rows(&rows, 40).unwrap();
        let r = min_eigpair(&a, 40).unwrap();
        assert_eq!(r.lambda_min.to_f64(), -1.0);
        assert_eq!(r.eigenvector[1].to_f64(), 1.0);
        let (vals, _) = jacobi_eigen(&a).unwrap();
        let vals: Vec<f64> = vals.iter().map(BigReal::to_f64).collect();
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn jacobi_agrees_with_sturm() {
        let a = build_dbar_bigreal(8, 40).unwrap();
        let (jac, vecs) = jacobi_eigen(&a).unwrap();
        let sturm = eigenvalues_sturm(&a).unwrap();
        for (x, y) in jac.iter().zip(&sturm) {
            assert!((x - y).abs().to_f64() < 1e-30);
        }
        let col0: Vec<BigReal> = vecs.iter().map(|r| r[0].clone()).collect();
        assert!(eig_residual(&a, &jac[0], &col0).to_f64() < 1e-30);
    }

    #[test]
    fn rejects_asymmetric() {
        let rows = vec![vec![1.0, 2.0], vec![0.0, 1.0]];
        assert!(BigSymMatrix::from_f64_rows(&rows, 40).is_err());
    }

    #[test]
    fn series_rejects_unsorted() {
        assert_eq!(
            min_eig_series(&[8, 4], PrecisionPolicy::Required).unwrap_err(),
            HighPrecError::Unsorted
        );
    }
}
