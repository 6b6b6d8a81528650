//! Two-type preferential attachment in which the types have different
//! fitness.
//!
//! * [`analysis`]: the competition functions `P`, `P^M`, `P^A`, their zeros
//!   and phase-transition thresholds.
//! * [`sim`]: exact simulation of the graph process with a prefix-sum
//!   sampler, plus closed-form one-step drift.
//! * [`urn`]: aggregate urn fast path for multiplicative fitness with
//!   `alpha = 0`, and exact enumeration oracles.
//! * [`experiments`]: ensembles, domination classification, parameter scans,
//!   Lyapunov monitoring and plots.

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod model;
pub mod poly;
pub mod rng;
pub mod scalar;
pub mod sim;
pub mod urn;

pub use error::{Error, Result};
pub use model::{Colour, FitnessModel, ModelKind, TypeAssignment};
pub use poly::PolyCoeffs;
pub use scalar::{parse_rational, Rational, Scalar};

/// Floating-point polynomial.
pub type Poly = PolyCoeffs<f64>;
/// Exact polynomial.
pub type ExactPoly = PolyCoeffs<Rational>;
/// Floating-point type assignment.
pub type Assignment = TypeAssignment<f64>;
/// Exact type assignment.
pub type ExactAssignment = TypeAssignment<Rational>;
/// Floating-point fitness model.
pub type Fitness = FitnessModel<f64>;
/// Exact fitness model.
pub type ExactFitness = FitnessModel<Rational>;
/// Floating-point competition function.
pub type Competition = analysis::CompetitionFunction<f64>;
/// Exact competition function.
pub type ExactCompetition = analysis::CompetitionFunction<Rational>;
