//! Exact scalars and the combinatorial coefficients used by the bracket formulas.
//!
//! Every coefficient in the engine is a [`CScalar`]: a complex number whose
//! real and imaginary parts are arbitrary-precision rationals. Nothing is
//! ever rounded.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Canonical reduced fraction with positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("{what} must be non-negative, got {value}")]
    Negative { what: &'static str, value: i64 },
    #[error("theta is only defined for L >= 2, got L = {0}")]
    ThetaOrder(i64),
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
}

/// Build a rational from a numerator and a non-zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parse `"p"` or `"p/q"` into a canonical rational.
pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let trimmed = s.trim();
    let r = Rational::from_str(trimmed).map_err(|_| ScalarError::Parse(s.to_string()))?;
    Ok(r)
}

/// Exact complex rational `re + im*i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CScalar {
    re: Rational,
    im: Rational,
}

impl CScalar {
    pub fn new(re: Rational, im: Rational) -> Self {
        CScalar { re, im }
    }

    pub fn real(re: Rational) -> Self {
        CScalar { re, im: Rational::zero() }
    }

    pub fn from_int(v: i64) -> Self {
        Self::real(int(v))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::real(Rational::from_integer(v))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::real(ratio(num, den))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        CScalar { re: Rational::zero(), im: Rational::one() }
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im(&self) -> &Rational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        CScalar { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `|z|^2`, always a non-negative rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn recip(&self) -> Result<Self, ScalarError> {
        let d = self.norm_sqr();
        if d.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(CScalar { re: &self.re / &d, im: -(&self.im / &d) })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self * &rhs.recip()?)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = CScalar::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }
}

impl fmt::Debug for CScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `3`, `-1/2`, `1/2+3/4*i`, `-i`.
impl fmt::Display for CScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let im_abs = self.im.abs();
        let im_part = if im_abs.is_one() { "i".to_string() } else { format!("{im_abs}*i") };
        if self.re.is_zero() {
            if self.im.is_negative() {
                write!(f, "-{im_part}")
            } else {
                write!(f, "{im_part}")
            }
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "{}{sign}{im_part}", self.re)
        }
    }
}

impl From<Rational> for CScalar {
    fn from(r: Rational) -> Self {
        CScalar::real(r)
    }
}

impl From<i64> for CScalar {
    fn from(v: i64) -> Self {
        CScalar::from_int(v)
    }
}

impl From<BigInt> for CScalar {
    fn from(v: BigInt) -> Self {
        CScalar::from_bigint(v)
    }
}

impl<'a> Add<&'a CScalar> for &'a CScalar {
    type Output = CScalar;
    fn add(self, rhs: &CScalar) -> CScalar {
        CScalar { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Sub<&'a CScalar> for &'a CScalar {
    type Output = CScalar;
    fn sub(self, rhs: &CScalar) -> CScalar {
        CScalar { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a CScalar> for &'a CScalar {
    type Output = CScalar;
    fn mul(self, rhs: &CScalar) -> CScalar {
        if self.im.is_zero() && rhs.im.is_zero() {
            return CScalar::real(&self.re * &rhs.re);
        }
        CScalar { re: &self.re * &rhs.re - &self.im * &rhs.im, im: &self.re * &rhs.im + &self.im * &rhs.re }
    }
}

impl Neg for &CScalar {
    type Output = CScalar;
    fn neg(self) -> CScalar {
        CScalar { re: -self.re.clone(), im: -self.im.clone() }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<CScalar> for CScalar {
            type Output = CScalar;
            fn $method(self, rhs: CScalar) -> CScalar { (&self).$method(&rhs) }
        }
        impl<'a> $tr<&'a CScalar> for CScalar {
            type Output = CScalar;
            fn $method(self, rhs: &CScalar) -> CScalar { (&self).$method(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for CScalar {
    type Output = CScalar;
    fn neg(self) -> CScalar {
        -&self
    }
}

impl Div<&CScalar> for &CScalar {
    type Output = CScalar;
    /// Panics on division by zero; use [`CScalar::checked_div`] for fallible input.
    fn div(self, rhs: &CScalar) -> CScalar {
        self.checked_div(rhs).expect("division by zero scalar")
    }
}

impl AddAssign<&CScalar> for CScalar {
    fn add_assign(&mut self, rhs: &CScalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&CScalar> for CScalar {
    fn sub_assign(&mut self, rhs: &CScalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&CScalar> for CScalar {
    fn mul_assign(&mut self, rhs: &CScalar) {
        *self = &*self * rhs;
    }
}

fn non_negative(what: &'static str, v: i64) -> Result<u64, ScalarError> {
    if v < 0 {
        Err(ScalarError::Negative { what, value: v })
    } else {
        Ok(v as u64)
    }
}

/// Binomial coefficient, with `binom(K, L) = 0` when `K < L`.
pub fn binom(k: i64, l: i64) -> Result<BigInt, ScalarError> {
    let k = non_negative("binom K", k)?;
    let l = non_negative("binom L", l)?;
    if l > k {
        return Ok(BigInt::zero());
    }
    let l = l.min(k - l);
    let mut acc = BigInt::one();
    for i in 0..l {
        acc *= BigInt::from(k - i);
        acc /= BigInt::from(i + 1);
    }
    Ok(acc)
}

/// Falling factorial `n (n-1) ... (n-L+1)`; 1 for `L = 0`, 0 for `n < L`.
pub fn falling(n: i64, l: i64) -> Result<BigInt, ScalarError> {
    let n = non_negative("falling n", n)?;
    let l = non_negative("falling L", l)?;
    if l > n {
        return Ok(BigInt::zero());
    }
    Ok((0..l).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i)))
}

/// `1 - δ_{n,k}`.
pub fn epsilon(n: i64, k: i64) -> i64 {
    i64::from(n != k)
}

/// Coefficient of the singular order-`L` term in the smeared bracket
/// `[B^n_k(g), B^N_K(f)]`:
///
/// `ε_{k,0} ε_{N,0} binom(k,L) N^(L) − ε_{K,0} ε_{n,0} binom(K,L) n^(L)`.
#[allow(non_snake_case)]
pub fn theta(l: i64, n: i64, k: i64, N: i64, K: i64) -> Result<BigInt, ScalarError> {
    if l < 2 {
        return Err(ScalarError::ThetaOrder(l));
    }
    let forward = BigInt::from(epsilon(k, 0) * epsilon(N, 0)) * binom(k, l)? * falling(N, l)?;
    let mirror = BigInt::from(epsilon(K, 0) * epsilon(n, 0)) * binom(K, l)? * falling(n, l)?;
    Ok(forward - mirror)
}
