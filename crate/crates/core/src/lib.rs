//! Exact star products on graded polynomial algebras.

pub mod atlas;
pub mod calculus;
pub mod error;
pub mod exec;
pub mod graded_ring;
pub mod models;
pub mod moyal;
pub mod poisson;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use exec::Exec;
pub use graded_ring::{GradedPoly, Grading, Monomial, Parity, Substitution, VarId, VarSpec, VarTable};
pub use moyal::StarEngine;
pub use poisson::SuperBivector;
pub use report::Status;
pub use scalar::Scalar;
