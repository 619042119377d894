//! Common fixed points of commuting nonexpansive semigroups with several
//! parameters: exact quadratic surds, Kronecker orbits, fixed-set reduction
//! checks, convergence schemes and a config-driven runner.

pub mod cli;
pub mod exactreal;
pub mod fixedsets;
pub mod geometry;
pub mod iterate;
pub mod kronecker;
pub mod semigroup;

pub use exactreal::{ExactReal, Rational};
pub use fixedsets::{Mapping, ParameterBasis};
pub use geometry::{ConvexSet, NormKind, Vector};
pub use iterate::{ConvergenceTrace, Schedule};
pub use semigroup::{Parameter, SemigroupInstance};
