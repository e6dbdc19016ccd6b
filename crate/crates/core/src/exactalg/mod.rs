//! Exact base-field and quotient-ring arithmetic.
//!
//! Prime fields F_p, rational function fields F_p(t_1,…,t_m), and
//! triangular quotient rings with nilpotent or algebraic generators. These
//! carry every ring-valued symbol used by the rest of the crate.

mod field;
mod linalg;
mod parse;
mod presentation;
mod ring;

pub use field::{BaseField, ExpVec, FieldElem};
pub use linalg::{field_rank, monomial_basis, RingMatrix};
pub use parse::{normal_form, parse_presentation};
pub use presentation::{PresentationBuilder, TriangularPresentation, VarRelation};
pub use ring::RingElem;

pub(crate) use field::{fp_inv, fp_mul, fp_pow};
