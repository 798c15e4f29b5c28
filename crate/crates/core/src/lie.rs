//! Structure-constant presentations of the RHPWN 1-mode algebra, `w∞`, and
//! its Witt subalgebra.
//!
//! | kind   | generators               | bracket                                              |
//! |--------|--------------------------|------------------------------------------------------|
//! | RHPWN  | `B^n_k`, n,k ≥ 0, n+k ≥ 3 | `[B^n_k, B^N_K] = (kN − Kn) B^{n+N−1}_{k+K−1}`       |
//! | w∞     | `B̂^n_k`, n ≥ 2, k ∈ ℤ     | `[B̂^n_k, B̂^N_K] = ((N−1)k − (n−1)K) B̂^{n+N−2}_{k+K}` |
//! | Witt   | `B̂^2_k`                  | `[B̂^2_k, B̂^2_K] = (k − K) B̂^2_{k+K}`                  |
//!
//! Brackets go through a [`StructureConstants`] table so that verification
//! scans can be pointed at a deliberately broken table.

use std::collections::btree_map::{BTreeMap, Entry};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::scalar::CScalar;
use crate::testfn::{FnLabel, TestFnError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgebraKind {
    Rhpwn,
    Winfinity,
    Witt,
}

impl AlgebraKind {
    pub fn name(self) -> &'static str {
        match self {
            AlgebraKind::Rhpwn => "RHPWN",
            AlgebraKind::Winfinity => "Winfinity",
            AlgebraKind::Witt => "Witt",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rhpwn" => Some(AlgebraKind::Rhpwn),
            "winfinity" | "winf" | "w-infinity" | "w_infinity" => Some(AlgebraKind::Winfinity),
            "witt" | "virasoro" => Some(AlgebraKind::Witt),
            _ => None,
        }
    }

    pub fn in_domain(self, n: i64, k: i64) -> bool {
        match self {
            AlgebraKind::Rhpwn => n >= 0 && k >= 0 && n + k >= 3,
            AlgebraKind::Winfinity => n >= 2,
            AlgebraKind::Witt => n == 2,
        }
    }

    /// Witt shares the `w∞` constants.
    fn uses_hat_constants(self) -> bool {
        !matches!(self, AlgebraKind::Rhpwn)
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("generator ({n},{k}) is outside the {kind} domain")]
    Domain { kind: AlgebraKind, n: i64, k: i64 },
    #[error("cannot combine {0} and {1} elements")]
    KindMismatch(AlgebraKind, AlgebraKind),
    #[error("labeled and unlabeled generators cannot be bracketed")]
    LabelMismatch,
    #[error(transparent)]
    TestFn(#[from] TestFnError),
}

/// Basis element `B^n_k` or `B̂^n_k`, optionally smeared with a test function.
/// An absent label stands for the 1-mode (χ_I-smeared) generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub kind: AlgebraKind,
    pub n: i64,
    pub k: i64,
    pub label: Option<FnLabel>,
}

impl Generator {
    pub fn new(kind: AlgebraKind, n: i64, k: i64) -> Result<Self, LieError> {
        if !kind.in_domain(n, k) {
            return Err(LieError::Domain { kind, n, k });
        }
        Ok(Self::relaxed(kind, n, k))
    }

    /// Skips domain validation; elements built from such generators report
    /// themselves as not certified.
    pub fn relaxed(kind: AlgebraKind, n: i64, k: i64) -> Self {
        Generator { kind, n, k, label: None }
    }

    pub fn with_label(mut self, label: FnLabel) -> Self {
        self.label = Some(label);
        self
    }

    pub fn is_certified(&self) -> bool {
        self.kind.in_domain(self.n, self.k)
    }

    pub fn involution(&self) -> Generator {
        let (n, k) = match self.kind {
            AlgebraKind::Rhpwn => (self.k, self.n),
            AlgebraKind::Winfinity | AlgebraKind::Witt => (self.n, -self.k),
        };
        Generator { kind: self.kind, n, k, label: self.label.as_ref().map(FnLabel::conjugate) }
    }
}

/// Source of the bracket of two basis generators: `(constant, n', k')`.
pub trait StructureConstants: Sync {
    #[allow(non_snake_case)]
    fn constant(&self, kind: AlgebraKind, n: i64, k: i64, N: i64, K: i64) -> (i64, i64, i64);
}

/// The genuine tables.
#[derive(Debug, Clone, Copy, Default)]
pub struct Standard;

impl StructureConstants for Standard {
    #[allow(non_snake_case)]
    fn constant(&self, kind: AlgebraKind, n: i64, k: i64, N: i64, K: i64) -> (i64, i64, i64) {
        if kind.uses_hat_constants() {
            ((N - 1) * k - (n - 1) * K, n + N - 2, k + K)
        } else {
            (k * N - K * n, n + N - 1, k + K - 1)
        }
    }
}

/// Fault-injection table: the genuine constants with the sign flipped
/// whenever the resulting upper index is odd. Antisymmetry survives, the
/// Jacobi identity does not.
#[derive(Debug, Clone, Copy, Default)]
pub struct SignFlipped;

impl StructureConstants for SignFlipped {
    #[allow(non_snake_case)]
    fn constant(&self, kind: AlgebraKind, n: i64, k: i64, N: i64, K: i64) -> (i64, i64, i64) {
        let (c, rn, rk) = Standard.constant(kind, n, k, N, K);
        if rn.rem_euclid(2) == 1 {
            (-c, rn, rk)
        } else {
            (c, rn, rk)
        }
    }
}

/// Finite linear combination of generators of one algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    kind: AlgebraKind,
    terms: BTreeMap<Generator, CScalar>,
}

impl Element {
    pub fn zero(kind: AlgebraKind) -> Self {
        Element { kind, terms: BTreeMap::new() }
    }

    pub fn basis(g: Generator) -> Self {
        Self::term(CScalar::one(), g)
    }

    pub fn term(c: CScalar, g: Generator) -> Self {
        let mut e = Element::zero(g.kind);
        e.push(c, g);
        e
    }

    /// Builds a certified basis element, validating the domain.
    pub fn generator(kind: AlgebraKind, n: i64, k: i64) -> Result<Self, LieError> {
        Ok(Self::basis(Generator::new(kind, n, k)?))
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
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

    pub fn terms(&self) -> impl Iterator<Item = (&Generator, &CScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &Generator) -> CScalar {
        self.terms.get(g).cloned().unwrap_or_default()
    }

    /// True iff every generator lies in the algebra's domain.
    pub fn is_certified(&self) -> bool {
        self.terms.keys().all(Generator::is_certified)
    }

    fn push(&mut self, c: CScalar, g: Generator) {
        debug_assert_eq!(g.kind, self.kind);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(g) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_kind(&self, other: &Element) -> Result<(), LieError> {
        if self.kind != other.kind {
            return Err(LieError::KindMismatch(self.kind, other.kind));
        }
        Ok(())
    }

    pub fn add(&self, other: &Element) -> Result<Element, LieError> {
        self.check_kind(other)?;
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.push(c.clone(), g.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Element) -> Result<Element, LieError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &CScalar) -> Element {
        let mut out = Element::zero(self.kind);
        for (g, v) in &self.terms {
            out.push(v * c, g.clone());
        }
        out
    }

    pub fn neg(&self) -> Element {
        self.scale(&CScalar::from_int(-1))
    }

    /// `B^n_k(f) ↦ B^k_n(f̄)` for RHPWN, `B̂^n_k ↦ B̂^n_{−k}` for w∞ and Witt;
    /// coefficients are conjugated (antilinear).
    pub fn involution(&self) -> Element {
        let mut out = Element::zero(self.kind);
        for (g, c) in &self.terms {
            out.push(c.conj(), g.involution());
        }
        out
    }
}

/// Bracket with the genuine structure constants.
pub fn bracket(x: &Element, y: &Element) -> Result<Element, LieError> {
    bracket_with(&Standard, x, y)
}

/// Bilinear extension of the basis bracket given by `table`.
pub fn bracket_with<T: StructureConstants + ?Sized>(table: &T, x: &Element, y: &Element) -> Result<Element, LieError> {
    x.check_kind(y)?;
    let kind = x.kind;
    let mut out = Element::zero(kind);
    for (a, ca) in &x.terms {
        for (b, cb) in &y.terms {
            let (c, rn, rk) = table.constant(kind, a.n, a.k, b.n, b.k);
            if c == 0 {
                continue;
            }
            let label = match (&a.label, &b.label) {
                (None, None) => None,
                (Some(la), Some(lb)) => Some(la.product(lb)?),
                _ => return Err(LieError::LabelMismatch),
            };
            if !kind.in_domain(rn, rk) && a.is_certified() && b.is_certified() {
                return Err(LieError::Domain { kind, n: rn, k: rk });
            }
            let coeff = &(ca * cb) * &CScalar::from_int(c);
            out.push(coeff, Generator { kind, n: rn, k: rk, label });
        }
    }
    Ok(out)
}

/// `[x,[y,z]] + [y,[z,x]] + [z,[x,y]]`.
pub fn jacobi_defect(x: &Element, y: &Element, z: &Element) -> Result<Element, LieError> {
    jacobi_defect_with(&Standard, x, y, z)
}

pub fn jacobi_defect_with<T: StructureConstants + ?Sized>(
    table: &T,
    x: &Element,
    y: &Element,
    z: &Element,
) -> Result<Element, LieError> {
    let a = bracket_with(table, x, &bracket_with(table, y, z)?)?;
    let b = bracket_with(table, y, &bracket_with(table, z, x)?)?;
    let c = bracket_with(table, z, &bracket_with(table, x, y)?)?;
    a.add(&b)?.add(&c)
}

/// `[x,y]* − [y*,x*]`; zero certifies *-compatibility on the pair.
pub fn star_compat_check(x: &Element, y: &Element) -> Result<Element, LieError> {
    let lhs = bracket(x, y)?.involution();
    let rhs = bracket(&y.involution(), &x.involution())?;
    lhs.sub(&rhs)
}

/// Checks `[B̂²_k, B̂²_K] = (k − K) B̂²_{k+K}`; returns the verdict and the computed bracket.
#[allow(non_snake_case)]
pub fn witt_check(k: i64, K: i64) -> (bool, Element) {
    let x = Element::generator(AlgebraKind::Witt, 2, k).expect("n = 2 is in the Witt domain");
    let y = Element::generator(AlgebraKind::Witt, 2, K).expect("n = 2 is in the Witt domain");
    let got = bracket(&x, &y).expect("Witt brackets stay in the Witt domain");
    let expected = Element::term(CScalar::from_int(k - K), Generator::new(AlgebraKind::Witt, 2, k + K).expect("n = 2"));
    // the same bracket computed in w∞ and restricted back to n = 2
    let hat = |kk| Element::generator(AlgebraKind::Winfinity, 2, kk).expect("n = 2");
    let via_w = bracket(&hat(k), &hat(K)).expect("w∞ bracket");
    let restricted_ok = via_w.len() == got.len()
        && via_w.terms().zip(got.terms()).all(|((gw, cw), (g, c))| gw.n == 2 && g.n == 2 && gw.k == g.k && cw == c);
    (got == expected && restricted_ok, got)
}

/// Inclusive integer range used by the scans; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexRange {
    pub lo: i64,
    pub hi: i64,
}

impl IndexRange {
    pub fn new(lo: i64, hi: i64) -> Self {
        IndexRange { lo, hi }
    }

    pub fn iter(self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

impl fmt::Display for IndexRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

/// All in-domain generators `(n, k)` within the ranges, in canonical order.
pub fn basis_in(kind: AlgebraKind, n_range: IndexRange, k_range: IndexRange) -> Vec<Generator> {
    let mut out = Vec::new();
    for n in n_range.iter() {
        for k in k_range.iter() {
            if kind.in_domain(n, k) {
                out.push(Generator::relaxed(kind, n, k));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiFailure {
    pub triple: [Generator; 3],
    pub defect: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiReport {
    pub kind: AlgebraKind,
    pub n_range: IndexRange,
    pub k_range: IndexRange,
    pub generators: usize,
    pub triples: usize,
    /// Seed of the triple sample, when the scan was not exhaustive.
    pub sample_seed: Option<u64>,
    pub failures: Vec<JacobiFailure>,
}

impl JacobiReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Jacobi defect of every basis triple (or of a seeded sample of `sample`
/// triples when given), in deterministic order.
pub fn jacobi_scan<T: StructureConstants + ?Sized>(
    table: &T,
    kind: AlgebraKind,
    n_range: IndexRange,
    k_range: IndexRange,
    sample: Option<(usize, u64)>,
) -> Result<JacobiReport, LieError> {
    let basis: Vec<Element> = basis_in(kind, n_range, k_range).into_iter().map(Element::basis).collect();
    let g = basis.len();
    let indices: Vec<(usize, usize, usize)> = match sample {
        None => (0..g).flat_map(|i| (0..g).flat_map(move |j| (0..g).map(move |l| (i, j, l)))).collect(),
        Some((count, seed)) if g > 0 => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count).map(|_| (rng.gen_range(0..g), rng.gen_range(0..g), rng.gen_range(0..g))).collect()
        }
        Some(_) => Vec::new(),
    };
    let results: Vec<Result<Option<JacobiFailure>, LieError>> = indices
        .par_iter()
        .map(|&(i, j, l)| {
            let defect = jacobi_defect_with(table, &basis[i], &basis[j], &basis[l])?;
            if defect.is_zero() {
                return Ok(None);
            }
            let gen = |e: &Element| e.terms().next().expect("basis element").0.clone();
            Ok(Some(JacobiFailure { triple: [gen(&basis[i]), gen(&basis[j]), gen(&basis[l])], defect }))
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        if let Some(f) = r? {
            failures.push(f);
        }
    }
    Ok(JacobiReport {
        kind,
        n_range,
        k_range,
        generators: g,
        triples: indices.len(),
        sample_seed: sample.map(|(_, seed)| seed),
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairReport {
    pub kind: AlgebraKind,
    pub n_range: IndexRange,
    pub k_range: IndexRange,
    pub generators: usize,
    pub pairs: usize,
    /// Offending pairs with the offending result.
    pub failures: Vec<(Generator, Generator, Element)>,
}

impl PairReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

fn pair_scan(
    kind: AlgebraKind,
    n_range: IndexRange,
    k_range: IndexRange,
    check: impl Fn(&Generator, &Generator) -> Option<Element> + Sync,
) -> PairReport {
    let basis = basis_in(kind, n_range, k_range);
    let failures: Vec<(Generator, Generator, Element)> = basis
        .par_iter()
        .flat_map_iter(|a| {
            basis.iter().filter_map(|b| check(a, b).map(|e| (a.clone(), b.clone(), e))).collect::<Vec<_>>()
        })
        .collect();
    PairReport { kind, n_range, k_range, generators: basis.len(), pairs: basis.len() * basis.len(), failures }
}

/// Every bracket of in-domain generators with non-zero constant must land in
/// the domain.
pub fn closure_check(kind: AlgebraKind, n_range: IndexRange, k_range: IndexRange) -> PairReport {
    pair_scan(kind, n_range, k_range, |a, b| {
        let (c, rn, rk) = Standard.constant(kind, a.n, a.k, b.n, b.k);
        if c != 0 && !kind.in_domain(rn, rk) {
            Some(Element::term(CScalar::from_int(c), Generator::relaxed(kind, rn, rk)))
        } else {
            None
        }
    })
}

/// `star_compat_check` over all basis pairs.
pub fn star_scan(kind: AlgebraKind, n_range: IndexRange, k_range: IndexRange) -> PairReport {
    pair_scan(kind, n_range, k_range, |a, b| {
        let x = Element::basis(a.clone());
        let y = Element::basis(b.clone());
        match star_compat_check(&x, &y) {
            Ok(d) if d.is_zero() => None,
            Ok(d) => Some(d),
            Err(_) => Some(Element::zero(kind)),
        }
    })
}
