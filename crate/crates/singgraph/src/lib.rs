//! Combinatorial invariants of normal surface singularities from weighted
//! dual graphs: discrepancies, thinness/log-discrepancy, dual divisors,
//! Mumford pull-backs, klt/lc classification, blow-up transforms, cusp
//! singularities over real quadratic fields, and the Jacobian identity for
//! monomial endomorphism germs. All arithmetic is exact.

pub mod arith;
pub mod blowup;
pub mod cusp;
pub mod endo;
pub mod graph;
pub mod linalg;
pub mod valuation;

pub use arith::{QuadElem, Rat};
pub use graph::{Classification, DualGraph, ExceptionalData, Verdict};
pub use valuation::GraphPoint;
