//! Exact-arithmetic engine for populations of critical points of master
//! functions attached to a symmetrizable generalized Cartan matrix, plus a
//! floating-point multistart solver for the underlying Bethe-type critical
//! equations that serves as an independent numeric oracle.
//!
//! The crate is organized around the generation procedure: a tuple of
//! polynomials `y = (y_1, …, y_r)` representing a critical point is extended
//! in direction `j` by solving the Wronskian equation
//! `W(y_j, ỹ_j) = T_j ∏_{i≠j} y_i^{-a_{j,i}}` for a polynomial `ỹ_j`, which
//! exists exactly when the Hermite reduction of `∫ T_j ∏ y_i^{-a_{j,i}} / y_j²`
//! leaves no logarithmic residual. Repeating in all directions and
//! deduplicating yields a population graph whose structural invariants
//! (Weyl-orbit degrees, constant charge, constant μ-vector) are checked
//! exactly over arbitrary-precision rationals.

// Index loops mirror the matrix formulas throughout; iterator rewrites
// obscure them.
#![allow(clippy::needless_range_loop)]

pub mod kacmoody;
pub mod oracle;
pub mod polyring;
pub mod population;
pub mod rat;
pub mod tuplegen;

pub use kacmoody::{CartanData, CartanError, DegreeVector, WeightPairings};
pub use polyring::{Poly, PolyError, RatFun};
pub use population::{ExploreError, ExploreLimits, PopulationGraph, VerificationReport};
pub use tuplegen::{
    Fertility, GenerationFamily, GenericityReport, ProblemData, ProblemError, Tuple, TupleError,
};
