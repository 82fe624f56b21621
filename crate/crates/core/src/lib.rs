//! Colombeau-type algebras of periodic generalized functions of ultradifferentiable class.
//!
//! Every object is carried on the Fourier side: periodic ultradistributions are coefficient
//! oracles ([`series::CoefDistribution`]), their regularizations are nets of trigonometric
//! polynomials ([`algebra::Net`]), and membership in the moderate, negligible and regular
//! spaces is decided by finite-sample growth tests against the associated function of a
//! weight sequence ([`weights::WeightSequence`]).
//!
//! All growth verdicts are *desk-scale*: the quantifiers over `h`, `λ` and `n` are evaluated
//! on finite grids and a finite index range, using the head-versus-tail rule in
//! [`verdict::bounded_test`]. They are numerical judgments, not proofs.

pub mod algebra;
pub mod embedding;
pub mod error;
pub mod operators;
pub mod regularity;
pub mod series;
pub mod verdict;
pub mod weights;

pub use error::{Error, Result};
pub use verdict::{Class, GrowthVerdict};

/// `1 / (2π)`, the plateau value of every mollifier and the Fourier coefficient of `δ`.
pub const INV_TWO_PI: f64 = 1.0 / (2.0 * std::f64::consts::PI);
