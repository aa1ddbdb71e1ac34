//! Probabilistic team semantics workbench.
//!
//! Weighted teams over finite structures, formulas with independence,
//! dependence, marginal-identity and entropy atoms, exact and bounded
//! evaluators, a compiler to real-arithmetic constraint systems with a
//! numeric feasibility solver, and a translation into second-order logic
//! over the reals.

pub mod atoms;
pub mod error;
pub mod fopt;
pub mod gen;
pub mod instance;
pub mod realc;
pub mod scalar;
pub mod solver;
pub mod structure;
pub mod syntax;
pub mod team;
pub mod teameval;
pub mod translate;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
pub use structure::{Elem, Structure};
pub use team::WeightedTeam;

/// Exact team, the default throughout the evaluators.
pub type Team = WeightedTeam<Rational>;
/// Double-precision team.
pub type FloatTeam = WeightedTeam<f64>;
