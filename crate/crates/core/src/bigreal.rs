//! Binary floating-point reals of configurable decimal precision.
//!
//! A value is `mantissa · 2^exponent` with the mantissa rounded to
//! nearest at `⌈digits · log₂10⌉ + 24` bits. Results of binary operations
//! carry the smaller precision of the two operands.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Smallest supported precision in decimal digits.
pub const MIN_DIGITS: u32 = 30;
const GUARD_BITS: u64 = 24;
const LOG2_10: f64 = std::f64::consts::LOG2_10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BigRealError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of a negative number")]
    NegativeSqrt,
    #[error("cannot parse {0:?} as a decimal number")]
    Parse(String),
    #[error("value is not finite")]
    NonFinite,
}

#[derive(Clone)]
pub struct BigReal {
    mant: BigInt,
    exp: i64,
    digits: u32,
}

fn bits_for(digits: u32) -> u64 {
    (digits as f64 * LOG2_10).ceil() as u64 + GUARD_BITS
}

fn pow10(k: u32) -> BigUint {
    BigUint::from(10u32).pow(k)
}

/// `round(m / 2^shift)`, ties away from zero.
fn round_shift(m: &BigUint, shift: u64) -> BigUint {
    if shift == 0 {
        return m.clone();
    }
    let half = BigUint::one() << (shift - 1);
    (m + half) >> shift
}

impl BigReal {
    fn from_parts(mant: BigInt, exp: i64, digits: u32) -> Self {
        let digits = digits.max(MIN_DIGITS);
        let mut out = Self { mant, exp, digits };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let limit = bits_for(self.digits);
        let len = self.mant.bits();
        if len > limit {
            let shift = len - limit;
            let (sign, mag) = self.mant.clone().into_parts();
            self.mant = BigInt::from_biguint(sign, round_shift(&mag, shift));
            self.exp += shift as i64;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn zero(digits: u32) -> Self {
        Self::from_parts(BigInt::zero(), 0, digits)
    }

    pub fn one(digits: u32) -> Self {
        Self::from_i64(1, digits)
    }

    pub fn from_i64(v: i64, digits: u32) -> Self {
        Self::from_parts(BigInt::from(v), 0, digits)
    }

    pub fn from_bigint(v: BigInt, digits: u32) -> Self {
        Self::from_parts(v, 0, digits)
    }

    /// Exact conversion of a finite double, rounded to `digits`.
    pub fn from_f64(v: f64, digits: u32) -> Result<Self, BigRealError> {
        if !v.is_finite() {
            return Err(BigRealError::NonFinite);
        }
        let (m, e, s) = Float::integer_decode(v);
        let mant = BigInt::from(m) * i64::from(s);
        Ok(Self::from_parts(mant, i64::from(e), digits))
    }

    /// `p / q` at the given precision.
    pub fn from_ratio(p: i64, q: i64, digits: u32) -> Result<Self, BigRealError> {
        Self::from_i64(p, digits).div(&Self::from_i64(q, digits))
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Same value re-rounded (or relabelled) at a new precision.
    pub fn with_digits(&self, digits: u32) -> Self {
        Self::from_parts(self.mant.clone(), self.exp, digits)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self {
            mant: self.mant.abs(),
            exp: self.exp,
            digits: self.digits,
        }
    }

    /// `⌊log₂|x|⌋ + 1`, or `i64::MIN` for zero.
    fn magnitude(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + self.mant.bits() as i64
        }
    }

    /// Multiplication by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        Self {
            mant: self.mant.clone(),
            exp: if self.is_zero() { 0 } else { self.exp + k },
            digits: self.digits,
        }
    }

    pub fn half(&self) -> Self {
        self.mul_pow2(-1)
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        let digits = self.digits.min(other.digits);
        if other.is_zero() {
            return self.with_digits(digits);
        }
        if self.is_zero() {
            return other.with_digits(digits);
        }
        let window = bits_for(digits) as i64 + 4;
        let (big, small) = if self.magnitude() >= other.magnitude() {
            (self, other)
        } else {
            (other, self)
        };
        if big.magnitude() - small.magnitude() > window {
            // `small` lies below half an ulp of `big` but still decides the
            // rounding direction at the last bit: keep one sticky bit.
            let sticky_exp = big.magnitude() - window - 1;
            let sticky = if small.is_negative() { -1 } else { 1 };
            let e = sticky_exp.min(big.exp);
            let mant = (&big.mant << (big.exp - e) as u64) + BigInt::from(sticky);
            return Self::from_parts(mant, e, digits);
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Self::from_parts(a + b, e, digits)
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn neg_ref(&self) -> Self {
        Self {
            mant: -&self.mant,
            exp: self.exp,
            digits: self.digits,
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        Self::from_parts(&self.mant * &other.mant, self.exp + other.exp, self.digits.min(other.digits))
    }

    pub fn div(&self, other: &Self) -> Result<Self, BigRealError> {
        if other.is_zero() {
            return Err(BigRealError::DivisionByZero);
        }
        let digits = self.digits.min(other.digits);
        if self.is_zero() {
            return Ok(Self::zero(digits));
        }
        let want = bits_for(digits) as i64 + 2;
        let shift = (want + other.mant.bits() as i64 - self.mant.bits() as i64).max(0) as u64;
        let num = &self.mant << shift;
        let (q, r) = num.div_rem(&other.mant);
        // Sticky bit so that rounding sees a nonzero remainder.
        let sticky = if r.is_zero() {
            BigInt::zero()
        } else {
            num.signum() * other.mant.signum()
        };
        let q = (q << 1u64) + sticky;
        Ok(Self::from_parts(q, self.exp - shift as i64 - other.exp - 1, digits))
    }

    pub fn recip(&self) -> Result<Self, BigRealError> {
        Self::one(self.digits).div(self)
    }

    pub fn sqrt(&self) -> Result<Self, BigRealError> {
        if self.is_negative() {
            return Err(BigRealError::NegativeSqrt);
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let want = 2 * bits_for(self.digits) as i64 + 4;
        let mut shift = (want - self.mant.bits() as i64).max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let m = (self.mant.magnitude() << shift as u64).sqrt();
        let e = (self.exp - shift) / 2;
        Ok(Self::from_parts(BigInt::from(m), e, self.digits))
    }

    /// Value as a fixed-point integer `round(x · 2^p)`.
    fn to_fixed(&self, p: i64) -> BigInt {
        let e = self.exp + p;
        if e >= 0 {
            &self.mant << e as u64
        } else {
            let (sign, mag) = self.mant.clone().into_parts();
            BigInt::from_biguint(sign, round_shift(&mag, (-e) as u64))
        }
    }

    /// `π` at the given precision (Machin's formula).
    pub fn pi(digits: u32) -> Self {
        let p = bits_for(digits.max(MIN_DIGITS)) as i64 + 32;
        let pi_fixed = 16 * atan_inv_fixed(5, p) - 4 * atan_inv_fixed(239, p);
        Self::from_parts(pi_fixed, -p, digits)
    }

    fn sin_cos_series(&self, want_sin: bool) -> Self {
        let digits = self.digits;
        if self.is_zero() {
            return if want_sin { Self::zero(digits) } else { Self::one(digits) };
        }
        let extra = self.magnitude().max(0);
        let work = digits + (extra as f64 / LOG2_10).ceil() as u32 + 10;
        let two_pi = Self::pi(work).mul_pow2(1);
        let x = self.with_digits(work);
        // Reduce to [−π, π].
        let turns = x.div(&two_pi).expect("2π is nonzero").round_to_integer();
        let r = x.sub_ref(&two_pi.mul_ref(&Self::from_bigint(turns, work)));
        let p = bits_for(work) as i64 + 16;
        let xf = r.to_fixed(p);
        let x2 = (&xf * &xf) >> p as u64;
        let (mut term, mut sum, mut k) = if want_sin {
            (xf.clone(), xf, 1u64)
        } else {
            let one = BigInt::one() << p as u64;
            (one.clone(), one, 0u64)
        };
        loop {
            term = -((&term * &x2) >> p as u64) / BigInt::from((k + 1) * (k + 2));
            if term.is_zero() {
                break;
            }
            sum += &term;
            k += 2;
        }
        Self::from_parts(sum, -p, digits)
    }

    pub fn sin(&self) -> Self {
        self.sin_cos_series(true)
    }

    pub fn cos(&self) -> Self {
        self.sin_cos_series(false)
    }

    /// Nearest integer, ties away from zero.
    pub fn round_to_integer(&self) -> BigInt {
        self.to_fixed(0)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let len = self.mant.bits();
        let (shift, m) = if len > 64 {
            let (sign, mag) = self.mant.clone().into_parts();
            let s = len - 64;
            (s as i64, BigInt::from_biguint(sign, mag >> s))
        } else {
            (0, self.mant.clone())
        };
        let mf = m.to_f64().unwrap_or(0.0);
        ldexp(mf, self.exp + shift)
    }

    /// Scientific notation with `digits` significant digits, e.g. `3.14…e0`.
    pub fn to_decimal_string(&self) -> String {
        self.to_decimal_with(self.digits)
    }

    pub fn to_decimal_with(&self, sig: u32) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let sig = sig.max(1);
        let mag = self.mant.magnitude();
        // Estimate of ⌊log₁₀|x|⌋ from the binary magnitude.
        let mut d = ((self.magnitude() - 1) as f64 / LOG2_10).floor() as i64;
        let scaled = loop {
            let s = scaled_integer(mag, self.exp, sig as i64 - 1 - d);
            let len = s.to_string().len() as i64;
            if len > sig as i64 {
                d += 1;
            } else if len < sig as i64 {
                d -= 1;
            } else {
                break s;
            }
        };
        let digits = scaled.to_string();
        let sign = if self.is_negative() { "-" } else { "" };
        let (head, tail) = digits.split_at(1);
        let tail = tail.trim_end_matches('0');
        if tail.is_empty() {
            format!("{sign}{head}e{d}")
        } else {
            format!("{sign}{head}.{tail}e{d}")
        }
    }
}

/// `round(mag · 2^exp · 10^k)` as an unsigned integer.
fn scaled_integer(mag: &BigUint, exp: i64, k: i64) -> BigUint {
    let mut num = mag.clone();
    let mut den = BigUint::one();
    if k >= 0 {
        num *= pow10(k as u32);
    } else {
        den *= pow10((-k) as u32);
    }
    if exp >= 0 {
        num <<= exp as u64;
    } else {
        den <<= (-exp) as u64;
    }
    let (q, r) = num.div_rem(&den);
    if r * 2u32 >= den {
        q + 1u32
    } else {
        q
    }
}

/// `atan(1/x)` as a fixed-point integer with `p` fractional bits.
fn atan_inv_fixed(x: u64, p: i64) -> BigInt {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = (BigInt::one() << p as u64) / &x;
    let mut sum = power.clone();
    let mut n = 1u64;
    loop {
        power /= &x2;
        if power.is_zero() {
            break;
        }
        n += 2;
        let term = &power / BigInt::from(n);
        if (n / 2) % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
    }
    sum
}

fn ldexp(mut m: f64, mut e: i64) -> f64 {
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
        if m.is_infinite() {
            return m;
        }
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
        if m == 0.0 {
            return m;
        }
    }
    m * 2f64.powi(e as i32)
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for BigReal {}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigReal {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.mant.sign(), other.mant.sign());
        if sa != sb {
            let rank = |s: Sign| match s {
                Sign::Minus => 0,
                Sign::NoSign => 1,
                Sign::Plus => 2,
            };
            return rank(sa).cmp(&rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        let by_mag = self.magnitude().cmp(&other.magnitude());
        if by_mag != Ordering::Equal {
            return if sa == Sign::Plus { by_mag } else { by_mag.reverse() };
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({}, {} digits)", self.to_decimal_with(20), self.digits)
    }
}

impl BigReal {
    /// Parses `[-]ddd[.ddd][e[-]xx]` at the given precision.
    pub fn parse(s: &str, digits: u32) -> Result<Self, BigRealError> {
        let err = || BigRealError::Parse(s.to_string());
        let t = s.trim();
        let (body, exp10) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| err())?),
            None => (t, 0),
        };
        let (neg, body) = match body.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, body.strip_prefix('+').unwrap_or(body)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        let all: String = format!("{int_part}{frac_part}");
        if !all.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let mut n = BigInt::from_str(&all).map_err(|_| err())?;
        if neg {
            n = -n;
        }
        let e10 = exp10 - frac_part.len() as i64;
        let work = digits.max(MIN_DIGITS);
        let value = if e10 >= 0 {
            Self::from_bigint(n * BigInt::from(pow10(e10 as u32)), work)
        } else {
            Self::from_bigint(n, work + 2)
                .div(&Self::from_bigint(BigInt::from(pow10((-e10) as u32)), work + 2))?
                .with_digits(work)
        };
        Ok(value)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &BigReal) -> BigReal {
                self.$f(rhs)
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                (&self).$f(&rhs)
            }
        }
    };
}

binop!(Add, add, add_ref);
binop!(Sub, sub, sub_ref);
binop!(Mul, mul, mul_ref);

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        self.neg_ref()
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        self.neg_ref()
    }
}
