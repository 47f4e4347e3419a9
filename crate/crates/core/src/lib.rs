//! Exact-arithmetic kernel for finite Lie conformal superalgebras presented
//! by polynomial structure constants.
//!
//! The crate is organized in layers:
//!
//! * [`poly`] — sparse multivariate polynomials over ℚ with role-tagged
//!   indeterminates (`del`, λ-variables, parameters) and an expression parser.
//! * [`algebra`] — bracket tables, the sesquilinear λ-bracket calculus and
//!   the axiom checkers (skew-symmetry, Jacobi, parity closure).
//! * [`catalog`] — built-in algebra constructors and the text file format.
//! * [`maps`] — conformal linear maps, adjoint maps, derivation and
//!   homomorphism/automorphism checking, composition.
//! * [`bider`] — conformal bilinear maps and the biderivation axioms.
//! * [`solver`] — bounded-degree linear ansatz enumeration over ℚ
//!   (derivation spaces, biderivation spaces, the key functional equation).
//! * [`modules`] — free conformal modules, the module axiom checker, the
//!   module catalog and rank-(1+1) discovery.
//! * [`report`] — deterministic machine- and human-readable reports.

pub mod algebra;
pub mod bider;
pub mod catalog;
pub mod error;
pub mod maps;
pub mod modules;
pub mod poly;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
pub use poly::{Indeterminate, Monomial, Polynomial, Rational, Ring, Role};
