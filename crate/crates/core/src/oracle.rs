//! Brute-force single-mode check of the CCR combinatorics.
//!
//! The CCR `[a, a†] = 1` is realized on polynomials of degree ≤ D by
//! `a = d/dx` and `a† = x·`, which keeps every matrix entry an integer.
//! Truncation only corrupts columns whose images pass through degree > D, so
//! each comparison is restricted to the guard-safe columns found by tracking
//! degrees along every word involved.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{binom, falling, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("truncation degree {got} too small, need at least {need}")]
    TooSmall { need: usize, got: usize },
    #[error("guard violated: degree {degree} needs more than {needed} headroom")]
    Guard { degree: usize, needed: usize },
    #[error("CCR fails on basis vector x^{0}")]
    Ccr(usize),
    #[error("negative index {0}")]
    Negative(i64),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Dense square matrix with exact integer entries, acting on column vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    dim: usize,
    data: Vec<BigInt>,
}

impl ExactMatrix {
    pub fn zeros(dim: usize) -> Self {
        ExactMatrix { dim, data: vec![BigInt::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = BigInt::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.data[row * self.dim + col]
    }

    fn set(&mut self, row: usize, col: usize, v: BigInt) {
        self.data[row * self.dim + col] = v;
    }

    pub fn mul(&self, rhs: &ExactMatrix) -> ExactMatrix {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for l in 0..d {
                let a = &self.data[i * d + l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = &rhs.data[l * d + j];
                    if !b.is_zero() {
                        out.data[i * d + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &ExactMatrix) -> ExactMatrix {
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        ExactMatrix { dim: self.dim, data }
    }

    pub fn sub(&self, rhs: &ExactMatrix) -> ExactMatrix {
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        ExactMatrix { dim: self.dim, data }
    }

    pub fn scale(&self, c: &BigInt) -> ExactMatrix {
        ExactMatrix { dim: self.dim, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn pow(&self, e: u32) -> ExactMatrix {
        (0..e).fold(Self::identity(self.dim), |acc, _| acc.mul(self))
    }

    pub fn commutator(&self, rhs: &ExactMatrix) -> ExactMatrix {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    /// Entry-exact equality restricted to columns `0..=max_col`.
    pub fn agrees_on_columns(&self, rhs: &ExactMatrix, max_col: usize) -> bool {
        (0..self.dim).all(|i| (0..=max_col.min(self.dim - 1)).all(|j| self.get(i, j) == rhs.get(i, j)))
    }
}

/// Creation or annihilation letter of a word, read right to left when applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    Create,
    Annihilate,
}

/// Highest degree reached when the word (rightmost letter first) is applied to `x^j`.
pub fn peak_degree(word: &[Letter], j: usize) -> usize {
    let mut deg = j;
    let mut peak = j;
    for letter in word.iter().rev() {
        match letter {
            Letter::Create => deg += 1,
            Letter::Annihilate => {
                if deg == 0 {
                    return peak;
                }
                deg -= 1;
            }
        }
        peak = peak.max(deg);
    }
    peak
}

/// `a†^n a^k` as a letter sequence.
pub fn normal_word(n: u32, k: u32) -> Vec<Letter> {
    let mut w = vec![Letter::Create; n as usize];
    w.extend(std::iter::repeat_n(Letter::Annihilate, k as usize));
    w
}

/// Largest column `j` such that every word stays within degree `d` from `x^j`.
pub fn safe_columns(words: &[Vec<Letter>], d: usize) -> Option<usize> {
    (0..=d).rev().find(|&j| words.iter().all(|w| peak_degree(w, j) <= d))
}

/// Truncated polynomial representation of one bosonic mode.
#[derive(Debug, Clone)]
pub struct PolyRepOps {
    pub degree: usize,
    pub annihilator: ExactMatrix,
    pub creator: ExactMatrix,
}

impl PolyRepOps {
    /// Builds `a` and `a†` on `x^0..x^D` and checks `[a, a†] = 1` on degrees `< D`.
    pub fn build(d: usize) -> Result<Self, OracleError> {
        if d < 2 {
            return Err(OracleError::TooSmall { need: 2, got: d });
        }
        let dim = d + 1;
        let mut annihilator = ExactMatrix::zeros(dim);
        let mut creator = ExactMatrix::zeros(dim);
        for m in 1..dim {
            annihilator.set(m - 1, m, BigInt::from(m));
            creator.set(m, m - 1, BigInt::one());
        }
        let ops = PolyRepOps { degree: d, annihilator, creator };
        let ccr = ops.annihilator.commutator(&ops.creator);
        let id = ExactMatrix::identity(dim);
        for j in 0..d {
            if (0..dim).any(|i| ccr.get(i, j) != id.get(i, j)) {
                return Err(OracleError::Ccr(j));
            }
        }
        Ok(ops)
    }

    /// Matrix of `a†^n a^k`.
    pub fn normal_monomial(&self, n: u32, k: u32) -> ExactMatrix {
        self.creator.pow(n).mul(&self.annihilator.pow(k))
    }

    /// `[a†^n a^k, a†^N a^K]`.
    #[allow(non_snake_case)]
    pub fn commutator_matrix(&self, n: u32, k: u32, N: u32, K: u32) -> ExactMatrix {
        self.normal_monomial(n, k).commutator(&self.normal_monomial(N, K))
    }

    /// `Σ c · a†^p a^q` for `(c, p, q)` in `terms`.
    pub fn normal_ordered(&self, terms: &[(BigInt, u32, u32)]) -> ExactMatrix {
        terms
            .iter()
            .fold(ExactMatrix::zeros(self.degree + 1), |acc, (c, p, q)| acc.add(&self.normal_monomial(*p, *q).scale(c)))
    }
}

fn natural(v: i64) -> Result<u32, OracleError> {
    u32::try_from(v).map_err(|_| OracleError::Negative(v))
}

/// Normal-ordered expansion of `[a†^n a^k, a†^N a^K]` from the binomial /
/// falling-factorial formula, as `(coefficient, creators, annihilators)`.
#[allow(non_snake_case)]
pub fn eq1_terms(n: i64, k: i64, N: i64, K: i64) -> Result<Vec<(BigInt, u32, u32)>, OracleError> {
    let (un, uk, uN, uK) = (natural(n)?, natural(k)?, natural(N)?, natural(K)?);
    let mut out = Vec::new();
    for l in 1..=uk.max(uK) {
        let li = i64::from(l);
        let c = binom(k, li)? * falling(N, li)? - binom(K, li)? * falling(n, li)?;
        if c.is_zero() {
            continue;
        }
        out.push((c, un + uN - l, uk + uK - l));
    }
    Ok(out)
}

/// Compares the matrix commutator with the closed-form expansion on every
/// guard-safe column. Requires `D > n + k + N + K`.
#[allow(non_snake_case)]
pub fn check_eq1(n: i64, k: i64, N: i64, K: i64, d: usize) -> Result<bool, OracleError> {
    let (un, uk, uN, uK) = (natural(n)?, natural(k)?, natural(N)?, natural(K)?);
    let needed = (un + uk + uN + uK) as usize;
    if d <= needed {
        return Err(OracleError::Guard { degree: d, needed });
    }
    let ops = PolyRepOps::build(d)?;
    let terms = eq1_terms(n, k, N, K)?;
    let lhs = ops.commutator_matrix(un, uk, uN, uK);
    let rhs = ops.normal_ordered(&terms);

    let mut words =
        vec![[normal_word(un, uk), normal_word(uN, uK)].concat(), [normal_word(uN, uK), normal_word(un, uk)].concat()];
    words.extend(terms.iter().map(|(_, p, q)| normal_word(*p, *q)));
    let max_col = safe_columns(&words, d).ok_or(OracleError::Guard { degree: d, needed })?;
    Ok(lhs.agrees_on_columns(&rhs, max_col))
}

/// With `P = a − a†` and `Q = a + a†`, checks `[P, Q^m] = 2m Q^{m−1}` on
/// guard-safe columns. Requires `D > m + 2`.
pub fn check_exchange_seed(m: u32, d: usize) -> Result<bool, OracleError> {
    let needed = m as usize + 2;
    if d <= needed {
        return Err(OracleError::Guard { degree: d, needed });
    }
    let ops = PolyRepOps::build(d)?;
    let p = ops.annihilator.sub(&ops.creator);
    let q = ops.annihilator.add(&ops.creator);
    let lhs = p.commutator(&q.pow(m));
    let rhs = if m == 0 { ExactMatrix::zeros(d + 1) } else { q.pow(m - 1).scale(&BigInt::from(2 * m)) };
    // P Q^m raises degree by at most m + 1
    let all_create = vec![Letter::Create; m as usize + 1];
    let max_col = safe_columns(&[all_create], d).ok_or(OracleError::Guard { degree: d, needed })?;
    Ok(lhs.agrees_on_columns(&rhs, max_col))
}
