//! Exact symbolic engine for renormalized higher powers of white noise
//! (RHPWN), the `w∞` Lie algebra, and their sandwich-operator realization.
//!
//! - [`scalar`]: exact complex rationals, binomials, falling factorials, θ_L.
//! - [`testfn`]: step-function test functions and the subspace vanishing at 0.
//! - [`wick`]: normally ordered CCR words, the monomial commutator,
//!   renormalization, and the smeared-bracket decomposition.
//! - [`lie`]: structure-constant algebras, Jacobi/closure/*-structure scans.
//! - [`sandwich`]: sandwich words and the `w∞` realization check.
//! - [`oracle`]: truncated polynomial representation used as a brute-force check.

pub mod lie;
pub mod oracle;
pub mod sandwich;
pub mod scalar;
pub mod testfn;
pub mod wick;

pub use lie::{AlgebraKind, Element, Generator, IndexRange};
pub use scalar::{CScalar, Rational};
pub use testfn::{FnLabel, FnSymbol, StepFn};
pub use wick::PointLabel;
