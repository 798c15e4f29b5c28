//! Test functions: complex, right-continuous step functions on the real line
//! with compact support, and the subspace `S0` of those vanishing at zero.
//!
//! The symbolic engines mostly work with abstract test-function symbols
//! ([`FnSymbol`], [`FnLabel`]); concrete [`StepFn`] values are attached where
//! a computation needs actual point values or integrals.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{parse_rational, CScalar, Rational, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TestFnError {
    #[error("breakpoints must be strictly increasing (position {0})")]
    UnsortedBreakpoints(usize),
    #[error("expected {expected} values for {breakpoints} breakpoints, got {got}")]
    ValueCount { breakpoints: usize, expected: usize, got: usize },
    #[error("unbounded pieces must carry value 0")]
    NonzeroTail,
    #[error("empty or reversed interval [{from}, {to})")]
    EmptyInterval { from: String, to: String },
    #[error("pieces overlap at [{from}, {to})")]
    Overlap { from: String, to: String },
    #[error("cannot multiply a formal test-function label with a concrete one")]
    MixedLabels,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Complex step function, right-continuous, zero outside a bounded set.
///
/// `values[0]` is the value on `(-inf, p_0)`, `values[i]` the value on
/// `[p_{i-1}, p_i)`, and the last entry the value on `[p_last, +inf)`.
/// Both tails are zero and adjacent pieces always differ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StepFn {
    breakpoints: Vec<Rational>,
    values: Vec<CScalar>,
}

impl StepFn {
    pub fn make_step(breakpoints: Vec<Rational>, values: Vec<CScalar>) -> Result<Self, TestFnError> {
        for (i, w) in breakpoints.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(TestFnError::UnsortedBreakpoints(i + 1));
            }
        }
        let expected = breakpoints.len() + 1;
        if values.len() != expected {
            return Err(TestFnError::ValueCount { breakpoints: breakpoints.len(), expected, got: values.len() });
        }
        if !values[0].is_zero() || !values[values.len() - 1].is_zero() {
            return Err(TestFnError::NonzeroTail);
        }
        Ok(Self::canonical(breakpoints, values))
    }

    /// Builds a step function from `(from, to, value)` pieces; gaps are zero.
    pub fn from_pieces(mut pieces: Vec<(Rational, Rational, CScalar)>) -> Result<Self, TestFnError> {
        pieces.sort_by(|a, b| a.0.cmp(&b.0));
        let mut breakpoints = Vec::new();
        let mut values = vec![CScalar::zero()];
        for (from, to, value) in pieces {
            if from >= to {
                return Err(TestFnError::EmptyInterval { from: from.to_string(), to: to.to_string() });
            }
            match breakpoints.last() {
                Some(last) if &from < last => {
                    return Err(TestFnError::Overlap { from: from.to_string(), to: to.to_string() });
                }
                Some(last) if &from == last => {
                    *values.last_mut().expect("values track breakpoints") = value;
                }
                _ => {
                    breakpoints.push(from);
                    values.push(value);
                }
            }
            breakpoints.push(to);
            values.push(CScalar::zero());
        }
        Ok(Self::canonical(breakpoints, values))
    }

    pub fn zero() -> Self {
        StepFn { breakpoints: Vec::new(), values: vec![CScalar::zero()] }
    }

    /// Characteristic function of a finite union of half-open intervals.
    pub fn indicator(set: &IntervalSet) -> Self {
        let pieces = set.intervals().iter().map(|(a, b)| (a.clone(), b.clone(), CScalar::one())).collect();
        Self::from_pieces(pieces).expect("interval sets are disjoint and non-empty")
    }

    fn canonical(breakpoints: Vec<Rational>, values: Vec<CScalar>) -> Self {
        let mut bps = Vec::with_capacity(breakpoints.len());
        let mut vals = Vec::with_capacity(values.len());
        let mut values = values.into_iter();
        vals.push(values.next().expect("at least one value"));
        for (p, v) in breakpoints.into_iter().zip(values) {
            if vals.last() == Some(&v) {
                continue;
            }
            bps.push(p);
            vals.push(v);
        }
        StepFn { breakpoints: bps, values: vals }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[CScalar] {
        &self.values
    }

    /// Bounded pieces `(from, to, value)` with non-zero value.
    pub fn pieces(&self) -> impl Iterator<Item = (&Rational, &Rational, &CScalar)> {
        self.breakpoints.windows(2).zip(&self.values[1..]).filter(|(_, v)| !v.is_zero()).map(|(w, v)| (&w[0], &w[1], v))
    }

    pub fn is_zero(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// Right-continuous point value.
    pub fn evaluate(&self, t: &Rational) -> CScalar {
        let idx = self.breakpoints.partition_point(|p| p <= t);
        self.values[idx].clone()
    }

    pub fn integrate(&self) -> CScalar {
        self.breakpoints.windows(2).zip(&self.values[1..]).fold(CScalar::zero(), |acc, (w, v)| {
            let len = CScalar::real(&w[1] - &w[0]);
            acc + v * &len
        })
    }

    pub fn is_in_s0(&self) -> bool {
        self.evaluate(&Rational::zero()).is_zero()
    }

    fn combine(&self, other: &StepFn, op: impl Fn(&CScalar, &CScalar) -> CScalar) -> StepFn {
        let mut points: Vec<Rational> = self.breakpoints.iter().chain(&other.breakpoints).cloned().collect();
        points.sort();
        points.dedup();
        let mut values = Vec::with_capacity(points.len() + 1);
        values.push(op(&CScalar::zero(), &CScalar::zero()));
        for p in &points {
            values.push(op(&self.evaluate(p), &other.evaluate(p)));
        }
        StepFn::canonical(points, values)
    }

    pub fn pointwise_product(&self, other: &StepFn) -> StepFn {
        self.combine(other, |a, b| a * b)
    }

    pub fn add(&self, other: &StepFn) -> StepFn {
        self.combine(other, |a, b| a + b)
    }

    pub fn scale(&self, c: &CScalar) -> StepFn {
        let values = self.values.iter().map(|v| v * c).collect();
        StepFn::canonical(self.breakpoints.clone(), values)
    }

    pub fn conjugate(&self) -> StepFn {
        StepFn { breakpoints: self.breakpoints.clone(), values: self.values.iter().map(CScalar::conj).collect() }
    }

    pub fn to_records(&self) -> Vec<StepRecord> {
        self.pieces()
            .map(|(a, b, v)| StepRecord {
                from: a.to_string(),
                to: b.to_string(),
                re: v.re().to_string(),
                im: v.im().to_string(),
            })
            .collect()
    }

    pub fn from_records(records: &[StepRecord]) -> Result<Self, TestFnError> {
        let pieces = records
            .iter()
            .map(|r| {
                Ok((
                    parse_rational(&r.from)?,
                    parse_rational(&r.to)?,
                    CScalar::new(parse_rational(&r.re)?, parse_rational(&r.im)?),
                ))
            })
            .collect::<Result<Vec<_>, ScalarError>>()?;
        Self::from_pieces(pieces)
    }
}

/// Serialized piece of a step function: value `re + im*i` on `[from, to)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub from: String,
    pub to: String,
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

fn zero_string() -> String {
    "0".to_string()
}

/// Finite union of disjoint half-open intervals `[a, b)`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSet {
    intervals: Vec<(Rational, Rational)>,
}

impl IntervalSet {
    /// Overlapping or touching intervals are merged.
    pub fn new(mut intervals: Vec<(Rational, Rational)>) -> Result<Self, TestFnError> {
        for (a, b) in &intervals {
            if a >= b {
                return Err(TestFnError::EmptyInterval { from: a.to_string(), to: b.to_string() });
            }
        }
        intervals.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        Ok(IntervalSet { intervals: merged })
    }

    pub fn single(a: Rational, b: Rational) -> Result<Self, TestFnError> {
        Self::new(vec![(a, b)])
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn contains(&self, t: &Rational) -> bool {
        self.intervals.iter().any(|(a, b)| a <= t && t < b)
    }
}

/// Abstract test-function symbol, possibly complex-conjugated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FnSymbol {
    pub name: String,
    pub conjugated: bool,
}

impl FnSymbol {
    pub fn new(name: impl Into<String>) -> Self {
        FnSymbol { name: name.into(), conjugated: false }
    }

    pub fn conj(&self) -> Self {
        FnSymbol { name: self.name.clone(), conjugated: !self.conjugated }
    }
}

impl fmt::Display for FnSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if self.conjugated {
            write!(f, "~")?;
        }
        Ok(())
    }
}

/// Test function attached to a smeared generator: either a formal product of
/// symbols (kept sorted) or a concrete step function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FnLabel {
    Formal(Vec<FnSymbol>),
    Concrete(StepFn),
}

impl FnLabel {
    pub fn symbol(name: impl Into<String>) -> Self {
        FnLabel::Formal(vec![FnSymbol::new(name)])
    }

    pub fn formal(mut symbols: Vec<FnSymbol>) -> Self {
        symbols.sort();
        FnLabel::Formal(symbols)
    }

    pub fn product(&self, other: &FnLabel) -> Result<FnLabel, TestFnError> {
        match (self, other) {
            (FnLabel::Formal(a), FnLabel::Formal(b)) => Ok(FnLabel::formal(a.iter().chain(b).cloned().collect())),
            (FnLabel::Concrete(a), FnLabel::Concrete(b)) => Ok(FnLabel::Concrete(a.pointwise_product(b))),
            _ => Err(TestFnError::MixedLabels),
        }
    }

    pub fn conjugate(&self) -> FnLabel {
        match self {
            FnLabel::Formal(s) => FnLabel::formal(s.iter().map(FnSymbol::conj).collect()),
            FnLabel::Concrete(f) => FnLabel::Concrete(f.conjugate()),
        }
    }
}

impl fmt::Display for FnLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnLabel::Formal(symbols) => {
                let parts: Vec<String> = symbols.iter().map(ToString::to_string).collect();
                write!(f, "{}", parts.join("."))
            }
            FnLabel::Concrete(step) => {
                let parts: Vec<String> = step.pieces().map(|(a, b, v)| format!("[{a},{b})->{v}")).collect();
                write!(f, "step{{{}}}", parts.join(","))
            }
        }
    }
}
