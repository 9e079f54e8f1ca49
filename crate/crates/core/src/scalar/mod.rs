//! Exact scalars: multi-quadratic fields, polynomials, rational functions.

pub mod expr;
pub mod field;
pub mod modp;
pub mod poly;
pub mod ratfunc;

pub use expr::parse_expr;
pub use field::{make_field, rat, rat_frac, FieldDescriptor, FieldElement, Rational, RootSet};
pub use modp::{reduce_mod_p, RootResidues};
pub use poly::{Monomial, Polynomial};
pub use ratfunc::{ratfunc_is_zero, RatFunc};
