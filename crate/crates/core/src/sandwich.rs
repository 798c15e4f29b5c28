//! Sandwich words `E(λ) · Q^m · E(λ)` and the mechanical check that the
//! operators
//!
//! ```text
//! B̂^n_k(f) = ∫ f(t) E_t(k/2) (Q_t/2)^{n−1} E_t(k/2) dt,
//! E_t(λ) = exp(λ(b_t − b_t†)),  Q_t = b_t + b_t†
//! ```
//!
//! close under commutation onto `w∞`:
//! `[B̂^n_k(g), B̂^N_K(f)] = ((N−1)k − (n−1)K) B̂^{n+N−2}_{k+K}(gf)`
//! after `δ^l(t−s) = δ(s)δ(t−s)` (l ≥ 2) and `f(0) = g(0) = 0`.
//!
//! Only cross-label exchanges are performed, using
//! `E_s(λ) Q_t^m = (Q_t + 2λδ(t−s))^m E_s(λ)` and
//! `Q_t^m E_s(λ) = E_s(λ) (Q_t − 2λδ(t−s))^m`. A same-label exchange would
//! produce `δ(0)` and is rejected.

use std::collections::btree_map::{BTreeMap, Entry};
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::lie::IndexRange;
use crate::scalar::{binom, int, ratio, CScalar, Rational, ScalarError};
use crate::testfn::{FnSymbol, StepFn};
use crate::wick::PointLabel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SandwichError {
    #[error("w∞ generators need n >= 2, got n = {0}")]
    Domain(i64),
    #[error("exchange at a single label {0} would create delta(0)")]
    SameLabel(PointLabel),
    #[error("no exponential at label {0} in the {1} block")]
    MissingExponential(PointLabel, &'static str),
    #[error("operands must each live on one label, at distinct labels")]
    LabelLayout,
    #[error("expression involves more than one pair of labels")]
    TooManyLabels,
    #[error("test function symbol {0} has no concrete binding")]
    Unbound(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `E_src(λ) Q_dst^m → Σ … Q_dst^j E_src(λ)`
    Rightward,
    /// `Q_dst^m E_src(λ) → E_src(λ) Σ … Q_dst^j`
    Leftward,
}

/// Structural part of a sandwich term, ordered by delta power first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SandwichWord {
    pub delta_l: u32,
    pub delta_pair: Option<(PointLabel, PointLabel)>,
    /// Parameters of the left exponential block, one merged factor per label.
    pub left: BTreeMap<PointLabel, Rational>,
    pub q_pow: BTreeMap<PointLabel, u32>,
    pub right: BTreeMap<PointLabel, Rational>,
    /// Formal test-function product; each symbol sits at its integration label.
    pub testfn: BTreeMap<PointLabel, Vec<FnSymbol>>,
}

fn add_param(block: &mut BTreeMap<PointLabel, Rational>, label: PointLabel, v: &Rational) {
    if v.is_zero() {
        return;
    }
    match block.entry(label) {
        Entry::Vacant(e) => {
            e.insert(v.clone());
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += v;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

fn add_pow(block: &mut BTreeMap<PointLabel, u32>, label: PointLabel, m: u32) {
    if m > 0 {
        *block.entry(label).or_insert(0) += m;
    }
}

impl SandwichWord {
    pub fn labels(&self) -> BTreeSet<PointLabel> {
        let mut out: BTreeSet<PointLabel> = self
            .left
            .keys()
            .chain(self.q_pow.keys())
            .chain(self.right.keys())
            .chain(self.testfn.keys())
            .copied()
            .collect();
        if let Some((a, b)) = self.delta_pair {
            out.insert(a);
            out.insert(b);
        }
        out
    }

    fn add_delta(&mut self, l: u32, a: PointLabel, b: PointLabel) -> Result<(), SandwichError> {
        if l == 0 {
            return Ok(());
        }
        if a == b {
            return Err(SandwichError::SameLabel(a));
        }
        let pair = (a.min(b), a.max(b));
        match self.delta_pair {
            Some(p) if p != pair => return Err(SandwichError::TooManyLabels),
            _ => self.delta_pair = Some(pair),
        }
        self.delta_l += l;
        Ok(())
    }

    fn add_symbols(&mut self, label: PointLabel, symbols: &[FnSymbol]) {
        if symbols.is_empty() {
            return;
        }
        let slot = self.testfn.entry(label).or_default();
        slot.extend_from_slice(symbols);
        slot.sort();
    }

    /// Single label carried by a one-point word; `Err` if there are several.
    fn single_label(&self) -> Result<Option<PointLabel>, SandwichError> {
        let labels = self.labels();
        match labels.len() {
            0 => Ok(None),
            1 => Ok(labels.into_iter().next()),
            _ => Err(SandwichError::LabelLayout),
        }
    }
}

fn fmt_block(f: &mut fmt::Formatter<'_>, block: &BTreeMap<PointLabel, Rational>) -> fmt::Result {
    for (l, v) in block {
        write!(f, "E_{l}({v})·")?;
    }
    Ok(())
}

impl fmt::Display for SandwichWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_block(f, &self.left)?;
        for (l, m) in &self.q_pow {
            if *m == 1 {
                write!(f, "Q_{l}·")?;
            } else {
                write!(f, "Q_{l}^{m}·")?;
            }
        }
        fmt_block(f, &self.right)?;
        if let Some((a, b)) = self.delta_pair {
            if self.delta_l == 1 {
                write!(f, "δ({a}-{b})·")?;
            } else {
                write!(f, "δ^{}({a}-{b})·", self.delta_l)?;
            }
        }
        let fns: Vec<String> =
            self.testfn.iter().flat_map(|(l, syms)| syms.iter().map(move |s| format!("{s}({l})"))).collect();
        write!(f, "[{}]", fns.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EQTerm {
    pub coeff: CScalar,
    pub word: SandwichWord,
}

impl EQTerm {
    pub fn identity() -> Self {
        EQTerm { coeff: CScalar::one(), word: SandwichWord::default() }
    }
}

impl fmt::Display for EQTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})·{}", self.coeff, self.word)
    }
}

/// Canonical sum of sandwich terms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EQExpr {
    terms: BTreeMap<SandwichWord, CScalar>,
}

impl EQExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, coeff: CScalar, word: SandwichWord) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn from_term(t: EQTerm) -> Self {
        let mut e = EQExpr::zero();
        e.add_term(t.coeff, t.word);
        e
    }

    pub fn terms(&self) -> impl Iterator<Item = EQTerm> + '_ {
        self.terms.iter().map(|(w, c)| EQTerm { coeff: c.clone(), word: w.clone() })
    }

    pub fn add(&self, other: &EQExpr) -> EQExpr {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(c.clone(), w.clone());
        }
        out
    }

    pub fn sub(&self, other: &EQExpr) -> EQExpr {
        self.add(&other.scale(&CScalar::from_int(-1)))
    }

    pub fn scale(&self, c: &CScalar) -> EQExpr {
        let mut out = EQExpr::zero();
        for (w, v) in &self.terms {
            out.add_term(v * c, w.clone());
        }
        out
    }
}

impl fmt::Display for EQExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms().map(|t| t.to_string()).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Word of `B̂^n_k` at `label`, smeared with `symbol`:
/// `(1/2)^{n−1} E(k/2) Q^{n−1} E(k/2)`.
pub fn gen_to_word(n: i64, k: i64, label: PointLabel, symbol: &str) -> Result<EQTerm, SandwichError> {
    gen_to_word_with(n, k, label, &[FnSymbol::new(symbol)])
}

/// As [`gen_to_word`] with an arbitrary formal test-function product.
pub fn gen_to_word_with(n: i64, k: i64, label: PointLabel, symbols: &[FnSymbol]) -> Result<EQTerm, SandwichError> {
    if n < 2 {
        return Err(SandwichError::Domain(n));
    }
    let q = u32::try_from(n - 1).map_err(|_| SandwichError::Domain(n))?;
    let half_k = ratio(k, 2);
    let mut word = SandwichWord::default();
    add_param(&mut word.left, label, &half_k);
    add_pow(&mut word.q_pow, label, q);
    add_param(&mut word.right, label, &half_k);
    word.add_symbols(label, symbols);
    let coeff = CScalar::real(Rational::new(BigInt::one(), BigInt::one() << (q as usize)));
    Ok(EQTerm { coeff, word })
}

/// `(Q + shift·δ)^m = Σ_j binom(m,j) shift^{m−j} Q^j δ^{m−j}` as `(j, coefficient)`.
fn shifted_power(m: u32, shift: &Rational) -> Result<Vec<(u32, Rational)>, SandwichError> {
    let mut out = Vec::with_capacity(m as usize + 1);
    for j in 0..=m {
        let b = binom(i64::from(m), i64::from(j))?;
        let mut c = Rational::from_integer(b);
        for _ in 0..(m - j) {
            c *= shift;
        }
        if !c.is_zero() {
            out.push((j, c));
        }
    }
    Ok(out)
}

/// Moves the exponential at `src` across the field-power block of `term`:
/// rightward from the left block into the right block, or leftward from the
/// right block into the left block.
pub fn exchange_in_term(term: &EQTerm, src: PointLabel, direction: Direction) -> Result<EQExpr, SandwichError> {
    let (from_block, name) = match direction {
        Direction::Rightward => (&term.word.left, "left"),
        Direction::Leftward => (&term.word.right, "right"),
    };
    let lambda = from_block.get(&src).cloned().ok_or(SandwichError::MissingExponential(src, name))?;
    if term.word.q_pow.contains_key(&src) {
        return Err(SandwichError::SameLabel(src));
    }
    if term.word.q_pow.len() > 1 {
        return Err(SandwichError::TooManyLabels);
    }
    let mut base = term.word.clone();
    match direction {
        Direction::Rightward => {
            base.left.remove(&src);
            add_param(&mut base.right, src, &lambda);
        }
        Direction::Leftward => {
            base.right.remove(&src);
            add_param(&mut base.left, src, &lambda);
        }
    }
    let Some((&dst, &m)) = term.word.q_pow.iter().next() else {
        return Ok(EQExpr::from_term(EQTerm { coeff: term.coeff.clone(), word: base }));
    };
    let two_lambda = &lambda * int(2);
    let shift = match direction {
        Direction::Rightward => two_lambda,
        Direction::Leftward => -two_lambda,
    };
    let mut out = EQExpr::zero();
    for (j, c) in shifted_power(m, &shift)? {
        let mut w = base.clone();
        w.q_pow.remove(&dst);
        add_pow(&mut w.q_pow, dst, j);
        w.add_delta(m - j, src, dst)?;
        out.add_term(&term.coeff * &CScalar::real(c), w);
    }
    Ok(out)
}

/// `E_src(λ) Q_dst^m` (rightward) or `Q_dst^m E_src(λ)` (leftward), normalized.
pub fn exchange_e_past_q(
    lambda: &Rational,
    src: PointLabel,
    m: u32,
    dst: PointLabel,
    direction: Direction,
) -> Result<EQExpr, SandwichError> {
    if src == dst {
        return Err(SandwichError::SameLabel(src));
    }
    let mut word = SandwichWord::default();
    add_pow(&mut word.q_pow, dst, m);
    let block = match direction {
        Direction::Rightward => &mut word.left,
        Direction::Leftward => &mut word.right,
    };
    if lambda.is_zero() {
        return Ok(EQExpr::from_term(EQTerm { coeff: CScalar::one(), word }));
    }
    add_param(block, src, lambda);
    exchange_in_term(&EQTerm { coeff: CScalar::one(), word }, src, direction)
}

/// Applies [`exchange_in_term`] to every term of `e` that carries an
/// exponential at `src` in the relevant block; other terms pass through.
pub fn exchange_expr(e: &EQExpr, src: PointLabel, direction: Direction) -> Result<EQExpr, SandwichError> {
    let mut out = EQExpr::zero();
    for t in e.terms() {
        let has = match direction {
            Direction::Rightward => t.word.left.contains_key(&src),
            Direction::Leftward => t.word.right.contains_key(&src),
        };
        if has {
            out = out.add(&exchange_in_term(&t, src, direction)?);
        } else {
            out.add_term(t.coeff, t.word);
        }
    }
    Ok(out)
}

/// Product of two one-point sandwich words at distinct labels, restored to
/// sandwich shape: the right exponential of `a` moves right across `b`'s
/// field block, the left exponential of `b` moves left across `a`'s.
pub fn multiply(a: &EQTerm, b: &EQTerm) -> Result<EQExpr, SandwichError> {
    let la = a.word.single_label()?;
    let lb = b.word.single_label()?;
    if a.word.delta_l > 0 || b.word.delta_l > 0 {
        return Err(SandwichError::LabelLayout);
    }
    let (t, s) = match (la, lb) {
        (Some(t), Some(s)) if t == s => return Err(SandwichError::SameLabel(t)),
        (Some(t), Some(s)) => (t, s),
        // a word with no label is a scalar multiple of the identity
        (None, _) => return Ok(EQExpr::from_term(EQTerm { coeff: &a.coeff * &b.coeff, word: b.word.clone() })),
        (_, None) => return Ok(EQExpr::from_term(EQTerm { coeff: &a.coeff * &b.coeff, word: a.word.clone() })),
    };
    let zero = Rational::zero();
    let lambda_b = b.word.left.get(&s).unwrap_or(&zero);
    let lambda_a = a.word.right.get(&t).unwrap_or(&zero);
    let p = a.word.q_pow.get(&t).copied().unwrap_or(0);
    let q = b.word.q_pow.get(&s).copied().unwrap_or(0);
    // Q_t^p E_s(λ_b) = E_s(λ_b) (Q_t − 2λ_b δ)^p and E_t(λ_a) Q_s^q = (Q_s + 2λ_a δ)^q E_t(λ_a)
    let left_moves = shifted_power(p, &(-(lambda_b * int(2))))?;
    let right_moves = shifted_power(q, &(lambda_a * int(2)))?;

    let mut base = SandwichWord::default();
    for block in [&a.word.left, &b.word.left] {
        for (l, v) in block {
            add_param(&mut base.left, *l, v);
        }
    }
    for block in [&a.word.right, &b.word.right] {
        for (l, v) in block {
            add_param(&mut base.right, *l, v);
        }
    }
    for (l, syms) in a.word.testfn.iter().chain(&b.word.testfn) {
        base.add_symbols(*l, syms);
    }
    let coeff = &a.coeff * &b.coeff;
    let mut out = EQExpr::zero();
    for (j1, c1) in &left_moves {
        for (j2, c2) in &right_moves {
            let mut w = base.clone();
            add_pow(&mut w.q_pow, t, *j1);
            add_pow(&mut w.q_pow, s, *j2);
            w.add_delta((p - j1) + (q - j2), t, s)?;
            out.add_term(&coeff * &CScalar::real(c1 * c2), w);
        }
    }
    Ok(out)
}

/// `ab − ba`.
pub fn commutator(a: &EQTerm, b: &EQTerm) -> Result<EQExpr, SandwichError> {
    Ok(multiply(a, b)?.sub(&multiply(b, a)?))
}

/// Outcome of [`reduce`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Reduced {
    /// Single-delta terms integrated onto one label.
    pub value: EQExpr,
    /// Terms with no delta; a commutator must leave none.
    pub l0_residual: EQExpr,
    /// Number of `δ^L`, `L >= 2`, terms removed because they carry `g(0) f(0) = 0`.
    pub dropped: usize,
    /// Higher-delta terms that could not be removed.
    pub singular: EQExpr,
}

/// Identifies the later label of the delta pair with the earlier one:
/// exponential parameters add per block, field powers add, test functions multiply.
fn integrate_delta(word: &SandwichWord) -> SandwichWord {
    let (keep, gone) = word.delta_pair.expect("single-delta term has a pair");
    let mut w = word.clone();
    w.delta_l = 0;
    w.delta_pair = None;
    if let Some(v) = w.left.remove(&gone) {
        add_param(&mut w.left, keep, &v);
    }
    if let Some(v) = w.right.remove(&gone) {
        add_param(&mut w.right, keep, &v);
    }
    if let Some(m) = w.q_pow.remove(&gone) {
        add_pow(&mut w.q_pow, keep, m);
    }
    if let Some(syms) = w.testfn.remove(&gone) {
        w.add_symbols(keep, &syms);
    }
    w
}

/// Splits `e` by delta power. With `assume_s0`, every `δ^L` term with
/// `L >= 2` becomes `δ(s)δ(t−s)` and integrates to `g(0)f(0)(…) = 0`, so it is
/// dropped and counted; otherwise such terms are returned in `singular`.
pub fn reduce(e: &EQExpr, assume_s0: bool) -> Reduced {
    reduce_by(e, |_| Ok(assume_s0)).expect("infallible policy")
}

/// As [`reduce`], deciding each singular term from concrete test functions:
/// a term is dropped iff the product of its test functions at 0 vanishes.
pub fn reduce_with(e: &EQExpr, env: &BTreeMap<String, StepFn>) -> Result<Reduced, SandwichError> {
    reduce_by(e, |word| {
        let mut product = CScalar::one();
        for sym in word.testfn.values().flatten() {
            let f = env.get(&sym.name).ok_or_else(|| SandwichError::Unbound(sym.name.clone()))?;
            let v = f.evaluate(&Rational::zero());
            product *= &if sym.conjugated { v.conj() } else { v };
        }
        Ok(product.is_zero())
    })
}

fn reduce_by(
    e: &EQExpr,
    vanishes: impl Fn(&SandwichWord) -> Result<bool, SandwichError>,
) -> Result<Reduced, SandwichError> {
    let mut out = Reduced::default();
    for t in e.terms() {
        match t.word.delta_l {
            0 => out.l0_residual.add_term(t.coeff, t.word),
            1 => out.value.add_term(t.coeff, integrate_delta(&t.word)),
            _ => {
                if vanishes(&t.word)? {
                    out.dropped += 1;
                } else {
                    out.singular.add_term(t.coeff, t.word);
                }
            }
        }
    }
    Ok(out)
}

/// Result of checking one commutator against the `w∞` relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport {
    pub n: i64,
    pub k: i64,
    pub big_n: i64,
    pub big_k: i64,
    pub pass: bool,
    pub expected_coeff: BigInt,
    pub computed: EQExpr,
    pub expected: EQExpr,
    pub l0_residual: EQExpr,
    pub dropped_singular_count: usize,
    /// Every surviving term has field power `n+N−3` and exponentials `(k+K)/2`.
    pub bookkeeping_ok: bool,
}

impl TheoremReport {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "k": self.k,
            "N": self.big_n,
            "K": self.big_k,
            "pass": self.pass,
            "expected_coeff": self.expected_coeff.to_string(),
            "dropped_singular_count": self.dropped_singular_count,
            "l0_residual_terms": self.l0_residual.len(),
        })
    }
}

/// Computes `[B̂^n_k(g), B̂^N_K(f)]` with `g` at `t` and `f` at `s`, reduces
/// it assuming `f, g ∈ S0`, and compares with
/// `(k(N−1) − K(n−1)) B̂^{n+N−2}_{k+K}(gf)` exactly.
#[allow(non_snake_case)]
pub fn verify_theorem(n: i64, k: i64, N: i64, K: i64) -> Result<TheoremReport, SandwichError> {
    let (t, s) = (PointLabel::T, PointLabel::S);
    let a = gen_to_word(n, k, t, "g")?;
    let b = gen_to_word(N, K, s, "f")?;
    let reduced = reduce(&commutator(&a, &b)?, true);

    let expected_coeff = BigInt::from(k * (N - 1) - K * (n - 1));
    let gf = [FnSymbol::new("f"), FnSymbol::new("g")];
    let expected = if expected_coeff.is_zero() {
        EQExpr::zero()
    } else {
        let w = gen_to_word_with(n + N - 2, k + K, t, &gf)?;
        EQExpr::from_term(w).scale(&CScalar::from_bigint(expected_coeff.clone()))
    };

    let q_expected = u32::try_from(n + N - 3).map_err(|_| SandwichError::Domain(n + N - 2))?;
    let half = ratio(k + K, 2);
    let param_ok = |block: &BTreeMap<PointLabel, Rational>| {
        if half.is_zero() {
            block.is_empty()
        } else {
            block.len() == 1 && block.get(&t) == Some(&half)
        }
    };
    let bookkeeping_ok = reduced.value.terms().all(|term| {
        term.word.q_pow.get(&t).copied().unwrap_or(0) == q_expected
            && term.word.q_pow.len() <= 1
            && param_ok(&term.word.left)
            && param_ok(&term.word.right)
    });

    let pass =
        reduced.l0_residual.is_zero() && reduced.singular.is_zero() && reduced.value == expected && bookkeeping_ok;
    Ok(TheoremReport {
        n,
        k,
        big_n: N,
        big_k: K,
        pass,
        expected_coeff,
        computed: reduced.value,
        expected,
        l0_residual: reduced.l0_residual,
        dropped_singular_count: reduced.dropped,
        bookkeeping_ok,
    })
}

/// [`verify_theorem`] over `n, N ∈ n_range`, `k, K ∈ k_range`, in
/// lexicographic `(n, k, N, K)` order.
pub fn verify_grid(n_range: IndexRange, k_range: IndexRange) -> Result<Vec<TheoremReport>, SandwichError> {
    let mut tuples = Vec::new();
    for n in n_range.iter() {
        for k in k_range.iter() {
            for nn in n_range.iter() {
                for kk in k_range.iter() {
                    tuples.push((n, k, nn, kk));
                }
            }
        }
    }
    tuples.par_iter().map(|&(n, k, nn, kk)| verify_theorem(n, k, nn, kk)).collect()
}
