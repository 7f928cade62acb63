//! The graded commutative ring: even (optionally Laurent) variables, Grassmann
//! variables and the central parameter `hbar`, over exact rationals.

mod monomial;
mod poly;
mod substitute;
mod vars;

pub use monomial::Monomial;
pub use poly::{mul, parity_of, GradedPoly, Grading, PolyDisplay};
pub use substitute::{substitute, try_inverse, Substitution};
pub use vars::{is_identifier, Parity, VarId, VarSpec, VarTable, VarTableBuilder, HBAR};
