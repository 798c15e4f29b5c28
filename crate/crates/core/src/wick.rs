//! Normally ordered white-noise words over labeled points.
//!
//! A [`WNTerm`] is `coeff * Π b_x†^{c_x} Π b_x^{a_x} * δ^L(t−s) * Π δ(p)`:
//! all creators stand left of all annihilators, the pair delta is tracked by
//! its power, and point evaluations `δ(p)` (produced by renormalization) are a
//! sorted multiset of labels.

use std::collections::btree_map::{BTreeMap, Entry};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};
use thiserror::Error;

use crate::scalar::{binom, epsilon, falling, theta, CScalar, ScalarError};
use crate::testfn::{FnLabel, StepFn, TestFnError};

const ALPHABET: [&str; 8] = ["t", "s", "u", "v", "w", "x", "y", "z"];

/// Formal integration point. Labels are ordered by the alphabet `t < s < u < ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointLabel(u8);

impl PointLabel {
    pub const T: PointLabel = PointLabel(0);
    pub const S: PointLabel = PointLabel(1);
    pub const U: PointLabel = PointLabel(2);

    pub fn from_name(name: &str) -> Option<Self> {
        ALPHABET.iter().position(|a| *a == name).map(|i| PointLabel(i as u8))
    }

    pub fn name(self) -> &'static str {
        ALPHABET[self.0 as usize]
    }
}

impl fmt::Display for PointLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WickError {
    #[error("delta(0): both points carry label {0}")]
    CoincidentLabels(PointLabel),
    #[error("test function does not vanish at 0; the singular part survives, use smear_bracket")]
    NotInS0,
    #[error("negative index {0}")]
    NegativeIndex(i64),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    TestFn(#[from] TestFnError),
}

/// Structural part of a term; the canonical sort key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub delta_l: u32,
    pub creators: BTreeMap<PointLabel, u32>,
    pub annihilators: BTreeMap<PointLabel, u32>,
    /// Pair of labels the delta connects; `None` iff `delta_l == 0`.
    pub delta_pair: Option<(PointLabel, PointLabel)>,
    pub point_evals: Vec<PointLabel>,
}

impl Word {
    pub fn unit() -> Self {
        Word {
            delta_l: 0,
            creators: BTreeMap::new(),
            annihilators: BTreeMap::new(),
            delta_pair: None,
            point_evals: Vec::new(),
        }
    }

    pub fn with_delta(mut self, l: u32, a: PointLabel, b: PointLabel) -> Result<Self, WickError> {
        if l == 0 {
            return Ok(self);
        }
        if a == b {
            return Err(WickError::CoincidentLabels(a));
        }
        self.delta_l = l;
        self.delta_pair = Some((a.min(b), a.max(b)));
        Ok(self)
    }

    pub fn creator(mut self, label: PointLabel, exp: u32) -> Self {
        if exp > 0 {
            *self.creators.entry(label).or_insert(0) += exp;
        }
        self
    }

    pub fn annihilator(mut self, label: PointLabel, exp: u32) -> Self {
        if exp > 0 {
            *self.annihilators.entry(label).or_insert(0) += exp;
        }
        self
    }

    pub fn creator_degree(&self) -> u32 {
        self.creators.values().sum()
    }

    pub fn annihilator_degree(&self) -> u32 {
        self.annihilators.values().sum()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (l, e) in &self.creators {
            parts.push(if *e == 1 { format!("b_{l}†") } else { format!("b_{l}†^{e}") });
        }
        for (l, e) in &self.annihilators {
            parts.push(if *e == 1 { format!("b_{l}") } else { format!("b_{l}^{e}") });
        }
        if let Some((a, b)) = self.delta_pair {
            if self.delta_l == 1 {
                parts.push(format!("δ({a}-{b})"));
            } else {
                parts.push(format!("δ^{}({a}-{b})", self.delta_l));
            }
        }
        for p in &self.point_evals {
            parts.push(format!("δ({p})"));
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("·"))
        }
    }
}

/// Coefficients keyed by `(creator power, annihilator power)`.
pub type DegreeMap = BTreeMap<(u32, u32), CScalar>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WNTerm {
    pub coeff: CScalar,
    pub word: Word,
}

/// Canonical finite sum of [`WNTerm`]s: like words merged, zeros dropped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WNExpr {
    terms: BTreeMap<Word, CScalar>,
}

impl WNExpr {
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

    pub fn add_term(&mut self, coeff: CScalar, word: Word) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (CScalar, Word)>) -> Self {
        let mut e = WNExpr::zero();
        for (c, w) in terms {
            e.add_term(c, w);
        }
        e
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &CScalar)> {
        self.terms.iter()
    }

    pub fn coeff_of(&self, word: &Word) -> CScalar {
        self.terms.get(word).cloned().unwrap_or_else(CScalar::zero)
    }

    pub fn add(&self, other: &WNExpr) -> WNExpr {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(c.clone(), w.clone());
        }
        out
    }

    pub fn scale(&self, c: &CScalar) -> WNExpr {
        WNExpr::from_terms(self.terms.iter().map(|(w, v)| (v * c, w.clone())))
    }

    pub fn neg(&self) -> WNExpr {
        self.scale(&CScalar::from_int(-1))
    }

    /// Coincident-point shadow: all deltas set to 1 and all labels identified.
    /// Returns `(creator power, annihilator power) -> coefficient`.
    pub fn coincident(&self) -> DegreeMap {
        let mut out = DegreeMap::new();
        for (w, c) in &self.terms {
            let slot = out.entry((w.creator_degree(), w.annihilator_degree())).or_default();
            *slot += c;
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let labels = |m: &BTreeMap<PointLabel, u32>| -> Value {
                    Value::Object(m.iter().map(|(l, e)| (l.name().to_string(), json!(e))).collect())
                };
                json!({
                    "coeff": coeff_json(c),
                    "creators": labels(&w.creators),
                    "annihilators": labels(&w.annihilators),
                    "delta_L": w.delta_l,
                    "point_evals": w.point_evals.iter().map(|p| p.name()).collect::<Vec<_>>(),
                })
            })
            .collect();
        Value::Array(terms)
    }
}

impl fmt::Display for WNExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("({c})·{w}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// `[re_num, re_den, im_num, im_den]`; numbers outside the i64 range are strings.
pub fn coeff_json(c: &CScalar) -> Value {
    let int = |v: &BigInt| -> Value {
        match i64::try_from(v) {
            Ok(small) => json!(small),
            Err(_) => json!(v.to_string()),
        }
    };
    json!([int(c.re().numer()), int(c.re().denom()), int(c.im().numer()), int(c.im().denom())])
}

fn natural(v: i64) -> Result<u32, WickError> {
    u32::try_from(v).map_err(|_| WickError::NegativeIndex(v))
}

fn big_to_scalar(v: BigInt) -> CScalar {
    CScalar::from_bigint(v)
}

/// `[b_t†^n b_t^k, b_s†^N b_s^K]` expanded by the formal CCR into normally
/// ordered words carrying powers of `δ(t−s)`. No renormalization is applied.
#[allow(non_snake_case)]
pub fn monomial_commutator(n: i64, k: i64, N: i64, K: i64, t: PointLabel, s: PointLabel) -> Result<WNExpr, WickError> {
    if t == s {
        return Err(WickError::CoincidentLabels(t));
    }
    let (un, uk, uN, uK) = (natural(n)?, natural(k)?, natural(N)?, natural(K)?);
    let mut out = WNExpr::zero();
    if epsilon(k, 0) * epsilon(N, 0) == 1 {
        for l in 1..=uk.min(uN) {
            let c = binom(k, l as i64)? * falling(N, l as i64)?;
            let word = Word::unit()
                .creator(t, un)
                .creator(s, uN - l)
                .annihilator(t, uk - l)
                .annihilator(s, uK)
                .with_delta(l, t, s)?;
            out.add_term(big_to_scalar(c), word);
        }
    }
    if epsilon(K, 0) * epsilon(n, 0) == 1 {
        for l in 1..=uK.min(un) {
            let c = binom(K, l as i64)? * falling(n, l as i64)?;
            let word = Word::unit()
                .creator(s, uN)
                .creator(t, un - l)
                .annihilator(s, uK - l)
                .annihilator(t, uk)
                .with_delta(l, t, s)?;
            out.add_term(-big_to_scalar(c), word);
        }
    }
    Ok(out)
}

/// Applies `δ^l(t−s) = δ(s) δ(t−s)` for every `l >= 2`. The point evaluation
/// is placed on the later label of the pair.
pub fn renormalize(e: &WNExpr) -> WNExpr {
    WNExpr::from_terms(e.terms().map(|(w, c)| {
        let mut w = w.clone();
        if w.delta_l >= 2 {
            let (_, later) = w.delta_pair.expect("delta power implies a pair");
            w.delta_l = 1;
            w.point_evals.push(later);
            w.point_evals.sort();
        }
        (c.clone(), w)
    }))
}

/// Test function argument of a smeared field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SmearArg {
    /// Abstract symbol; `in_s0` asserts it vanishes at zero.
    Symbol {
        name: String,
        in_s0: bool,
    },
    Concrete(StepFn),
}

impl SmearArg {
    pub fn symbol(name: impl Into<String>, in_s0: bool) -> Self {
        SmearArg::Symbol { name: name.into(), in_s0 }
    }

    /// Value at the origin, or `None` for a symbol not known to vanish there.
    pub fn value_at_zero(&self) -> Option<CScalar> {
        match self {
            SmearArg::Symbol { in_s0: true, .. } => Some(CScalar::zero()),
            SmearArg::Symbol { in_s0: false, .. } => None,
            SmearArg::Concrete(f) => Some(f.evaluate(&num_rational::BigRational::zero())),
        }
    }

    pub fn label(&self) -> FnLabel {
        match self {
            SmearArg::Symbol { name, .. } => FnLabel::symbol(name.clone()),
            SmearArg::Concrete(f) => FnLabel::Concrete(f.clone()),
        }
    }

    pub fn is_in_s0(&self) -> bool {
        self.value_at_zero().is_some_and(|v| v.is_zero())
    }
}

/// One ill-defined term `θ_L g(0) f(0) b_0†^{creators} b_0^{annihilators}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularTerm {
    pub order: u32,
    pub theta: BigInt,
    pub creators: i64,
    pub annihilators: i64,
    /// `g(0) f(0)`; `None` when a symbolic argument may not vanish at 0.
    pub point_product: Option<CScalar>,
}

impl SingularTerm {
    pub fn vanishes(&self) -> bool {
        self.point_product.as_ref().is_some_and(CScalar::is_zero)
    }
}

/// Regular plus singular parts of a smeared bracket `[B^n_k(g), B^N_K(f)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketDecomposition {
    pub regular_coeff: BigInt,
    pub regular_index: (i64, i64),
    pub regular_testfn: FnLabel,
    pub singular_terms: Vec<SingularTerm>,
}

impl BracketDecomposition {
    pub fn singular_vanishes(&self) -> bool {
        self.singular_terms.iter().all(SingularTerm::vanishes)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "regular": {
                "coeff": self.regular_coeff.to_string(),
                "n": self.regular_index.0,
                "k": self.regular_index.1,
                "testfn": self.regular_testfn.to_string(),
            },
            "singular": self.singular_terms.iter().map(|s| json!({
                "L": s.order,
                "theta": s.theta.to_string(),
                "creators": s.creators,
                "annihilators": s.annihilators,
                "point_product": s.point_product.as_ref().map(coeff_json),
            })).collect::<Vec<_>>(),
            "singular_vanishes": self.singular_vanishes(),
        })
    }
}

/// Decomposition of the smeared bracket into the regular `B^{n+N-1}_{k+K-1}(gf)`
/// part and the singular `b_0` terms for `2 <= L <= (K∧n)∨(k∧N)`.
#[allow(non_snake_case)]
pub fn smear_bracket(
    n: i64,
    k: i64,
    g: &SmearArg,
    N: i64,
    K: i64,
    f: &SmearArg,
) -> Result<BracketDecomposition, WickError> {
    for v in [n, k, N, K] {
        natural(v)?;
    }
    let regular_coeff =
        BigInt::from(epsilon(k, 0) * epsilon(N, 0) * k * N) - BigInt::from(epsilon(K, 0) * epsilon(n, 0) * K * n);
    let point_product = match (g.value_at_zero(), f.value_at_zero()) {
        (Some(a), Some(b)) => Some(&a * &b),
        (Some(a), None) | (None, Some(a)) if a.is_zero() => Some(CScalar::zero()),
        _ => None,
    };
    let upper = K.min(n).max(k.min(N));
    let mut singular_terms = Vec::new();
    for l in 2..=upper {
        let th = theta(l, n, k, N, K)?;
        if th.is_zero() {
            continue;
        }
        singular_terms.push(SingularTerm {
            order: l as u32,
            theta: th,
            creators: N + n - l,
            annihilators: K + k - l,
            point_product: point_product.clone(),
        });
    }
    Ok(BracketDecomposition {
        regular_coeff,
        regular_index: (n + N - 1, k + K - 1),
        regular_testfn: g.label().product(&f.label())?,
        singular_terms,
    })
}

/// Smears a renormalized two-point expression against `g` at `t` and `f` at `s`.
///
/// Words with a single `δ(t−s)` and no point evaluations collapse onto
/// `B^{creators}_{annihilators}(gf)`; words carrying `δ(s)` become singular
/// terms indexed by their total degrees. Returns the regular part as a map
/// from index pairs to coefficients and the singular part as a map from
/// `(creators, annihilators)` to coefficients. Words with no pair delta are
/// not smearable to a single field and are returned in the third slot.
pub fn smear_expr(e: &WNExpr) -> (DegreeMap, DegreeMap, WNExpr) {
    let mut regular = DegreeMap::new();
    let mut singular = DegreeMap::new();
    let mut rest = WNExpr::zero();
    for (w, c) in e.terms() {
        let key = (w.creator_degree(), w.annihilator_degree());
        match (w.delta_l, w.point_evals.is_empty()) {
            (1, true) => *regular.entry(key).or_default() += c,
            (1, false) => *singular.entry(key).or_default() += c,
            _ => rest.add_term(c.clone(), w.clone()),
        }
    }
    regular.retain(|_, c| !c.is_zero());
    singular.retain(|_, c| !c.is_zero());
    (regular, singular, rest)
}

/// Renormalized bracket `[B^n_k, B^N_K]_R = (kN − Kn) B^{n+N-1}_{k+K-1}`.
#[allow(non_snake_case)]
pub fn renormalized_bracket(n: i64, k: i64, N: i64, K: i64) -> (i64, (i64, i64)) {
    (k * N - K * n, (n + N - 1, k + K - 1))
}

/// As [`renormalized_bracket`], refusing concrete test functions outside `S0`.
#[allow(non_snake_case)]
pub fn renormalized_bracket_checked(
    n: i64,
    k: i64,
    g: &SmearArg,
    N: i64,
    K: i64,
    f: &SmearArg,
) -> Result<(i64, (i64, i64)), WickError> {
    for arg in [g, f] {
        if let SmearArg::Concrete(step) = arg {
            if !step.is_in_s0() {
                return Err(WickError::NotInS0);
            }
        }
    }
    Ok(renormalized_bracket(n, k, N, K))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use crate::testfn::IntervalSet;

    const T: PointLabel = PointLabel::T;
    const S: PointLabel = PointLabel::S;

    fn c(v: i64) -> CScalar {
        CScalar::from_int(v)
    }

    #[test]
    fn ccr_base_case() {
        let e = monomial_commutator(0, 1, 1, 0, T, S).unwrap();
        let expected = WNExpr::from_terms([(c(1), Word::unit().with_delta(1, T, S).unwrap())]);
        assert_eq!(e, expected);
    }

    #[test]
    fn squares_commutator() {
        let e = monomial_commutator(0, 2, 2, 0, T, S).unwrap();
        let expected = WNExpr::from_terms([
            (c(4), Word::unit().creator(S, 1).annihilator(T, 1).with_delta(1, T, S).unwrap()),
            (c(2), Word::unit().with_delta(2, T, S).unwrap()),
        ]);
        assert_eq!(e, expected);
    }

    #[test]
    fn number_operators() {
        let e = monomial_commutator(1, 1, 1, 1, T, S).unwrap();
        let expected = WNExpr::from_terms([
            (c(1), Word::unit().creator(T, 1).annihilator(S, 1).with_delta(1, T, S).unwrap()),
            (c(-1), Word::unit().creator(S, 1).annihilator(T, 1).with_delta(1, T, S).unwrap()),
        ]);
        assert_eq!(e, expected);
        assert!(e.coincident().is_empty());
    }

    #[test]
    fn identical_labels_rejected() {
        assert_eq!(monomial_commutator(1, 1, 1, 1, T, T), Err(WickError::CoincidentLabels(T)));
        assert!(Word::unit().with_delta(2, S, S).is_err());
    }

    #[test]
    fn commuting_creators_give_zero() {
        assert!(monomial_commutator(3, 0, 2, 0, T, S).unwrap().is_zero());
    }

    #[test]
    fn renormalize_rules() {
        let cubic = WNExpr::from_terms([(c(5), Word::unit().creator(T, 1).with_delta(3, T, S).unwrap())]);
        let r = renormalize(&cubic);
        let (w, coeff) = r.terms().next().unwrap();
        assert_eq!(coeff, &c(5));
        assert_eq!(w.delta_l, 1);
        assert_eq!(w.point_evals, vec![S]);

        let linear = WNExpr::from_terms([(c(2), Word::unit().with_delta(1, T, S).unwrap())]);
        assert_eq!(renormalize(&linear), linear);

        let e = monomial_commutator(2, 3, 3, 2, T, S).unwrap();
        assert_eq!(renormalize(&renormalize(&e)), renormalize(&e));
        assert!(renormalize(&e).terms().all(|(w, _)| w.delta_l <= 1));
    }

    #[test]
    fn renormalize_is_linear() {
        let a = monomial_commutator(1, 3, 2, 1, T, S).unwrap();
        let b = monomial_commutator(2, 2, 3, 0, T, S).unwrap();
        let z = CScalar::new(int(2), int(-3));
        assert_eq!(renormalize(&a.add(&b)), renormalize(&a).add(&renormalize(&b)));
        assert_eq!(renormalize(&a.scale(&z)), renormalize(&a).scale(&z));
    }

    #[test]
    fn antisymmetry_small_grid() {
        for n in 0..=5 {
            for k in 0..=5 {
                for nn in 0..=5 {
                    for kk in 0..=5 {
                        let a = monomial_commutator(n, k, nn, kk, T, S).unwrap();
                        let b = monomial_commutator(nn, kk, n, k, S, T).unwrap();
                        assert!(a.add(&b).is_zero(), "({n},{k},{nn},{kk})");
                    }
                }
            }
        }
    }

    #[test]
    fn smear_examples() {
        let g = SmearArg::symbol("g", true);
        let f = SmearArg::symbol("f", true);
        let d = smear_bracket(1, 2, &g, 2, 1, &f).unwrap();
        assert_eq!(d.regular_coeff, BigInt::from(3));
        assert_eq!(d.regular_index, (2, 2));
        assert_eq!(
            d.regular_testfn,
            FnLabel::formal(vec![crate::testfn::FnSymbol::new("f"), crate::testfn::FnSymbol::new("g"),])
        );
        assert_eq!(d.singular_terms.len(), 1);
        assert_eq!(d.singular_terms[0].order, 2);
        assert_eq!(d.singular_terms[0].theta, BigInt::from(2));
        assert_eq!(d.singular_terms[0].point_product, Some(CScalar::zero()));

        let d = smear_bracket(3, 0, &g, 2, 0, &f).unwrap();
        assert!(d.regular_coeff.is_zero());
        assert!(d.singular_terms.is_empty());

        let d = smear_bracket(1, 1, &g, 1, 1, &f).unwrap();
        assert!(d.regular_coeff.is_zero());
        assert_eq!(d.regular_index, (1, 1));
        assert!(d.singular_terms.is_empty());
    }

    #[test]
    fn smear_concrete_outside_s0_keeps_singular_part() {
        let chi = StepFn::indicator(&IntervalSet::single(int(-1), int(1)).unwrap());
        let arg = SmearArg::Concrete(chi);
        let d = smear_bracket(1, 2, &arg, 2, 1, &arg).unwrap();
        assert_eq!(d.singular_terms[0].point_product, Some(CScalar::one()));
        assert!(!d.singular_vanishes());
        assert_eq!(renormalized_bracket_checked(1, 2, &arg, 2, 1, &arg), Err(WickError::NotInS0));
        let unknown = SmearArg::symbol("h", false);
        let d = smear_bracket(1, 2, &unknown, 2, 1, &unknown).unwrap();
        assert_eq!(d.singular_terms[0].point_product, None);
    }

    #[test]
    fn renormalized_bracket_examples() {
        assert_eq!(renormalized_bracket(1, 2, 2, 1), (3, (2, 2)));
        assert_eq!(renormalized_bracket(3, 4, 3, 4), (0, (5, 7)));
        assert_eq!(renormalized_bracket(2, 1, 1, 2), (-3, (2, 2)));
    }

    /// The formula route (theta coefficients) agrees with the word route
    /// (commutator, renormalize, smear) on every index tuple.
    #[test]
    fn smear_bracket_matches_word_route() {
        let g = SmearArg::symbol("g", false);
        let f = SmearArg::symbol("f", false);
        for n in 0..=5i64 {
            for k in 0..=5i64 {
                for nn in 0..=5i64 {
                    for kk in 0..=5i64 {
                        let d = smear_bracket(n, k, &g, nn, kk, &f).unwrap();
                        let e = renormalize(&monomial_commutator(n, k, nn, kk, T, S).unwrap());
                        let (regular, singular, rest) = smear_expr(&e);
                        assert!(rest.is_zero());
                        let reg_expected: BTreeMap<(u32, u32), CScalar> = if d.regular_coeff.is_zero() {
                            BTreeMap::new()
                        } else {
                            let idx = (d.regular_index.0 as u32, d.regular_index.1 as u32);
                            [(idx, CScalar::from_bigint(d.regular_coeff.clone()))].into()
                        };
                        assert_eq!(regular, reg_expected, "regular ({n},{k},{nn},{kk})");
                        let sing_expected: BTreeMap<(u32, u32), CScalar> = d
                            .singular_terms
                            .iter()
                            .map(|s| {
                                ((s.creators as u32, s.annihilators as u32), CScalar::from_bigint(s.theta.clone()))
                            })
                            .collect();
                        assert_eq!(singular, sing_expected, "singular ({n},{k},{nn},{kk})");
                    }
                }
            }
        }
    }

    #[test]
    fn json_shape() {
        let e = monomial_commutator(0, 2, 2, 0, T, S).unwrap();
        let v = e.to_json();
        assert_eq!(v[0]["coeff"], json!([4, 1, 0, 1]));
        assert_eq!(v[0]["creators"], json!({"s": 1}));
        assert_eq!(v[0]["delta_L"], json!(1));
        let r = renormalize(&e).to_json();
        let evals: Vec<_> = r.as_array().unwrap().iter().map(|t| t["point_evals"].clone()).collect();
        assert!(evals.contains(&json!(["s"])), "{r}");
    }
}
