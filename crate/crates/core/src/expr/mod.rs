//! Jet-space computer algebra.
//!
//! Expressions are kept in a canonical expanded form: quotients of sparse
//! Laurent polynomials over interned atoms (constant symbols, `t`, `r`, jet
//! coordinates, opaque function applications, `ln`, `exp` and powers of sums).
//! Equality of canonical forms is equality of values, so zero testing is a
//! structural check.

mod atom;
mod calculus;
mod context;
mod eval;
mod parse;
mod poly;
mod print;
pub mod random;
mod q;
mod rat;
mod subst;

pub use atom::{Atom, AtomKind, Field, Var};
pub use calculus::{
    d_r, d_t, euler_operator, euler_product_identities, euler_rel3_variant, higher_euler, is_total_r_derivative, max_r_order, partial,
    total_derivative, total_derivative_n, Derivation,
};
pub use context::{EvolutionModel, Restrictor, SystemContext};
pub use eval::{
    cross_check_zero, eval, numerically_zero, sample_points, Evaluator, ExpSumModel, SamplePoint,
    Valuation, CROSS_CHECK_POINTS, CROSS_CHECK_SEED,
};
pub use parse::{parse, Parser};
pub use poly::{Exponent, Mono, Poly};
pub use q::Q;
pub use rat::{Expr, Factor};
pub use subst::{substitute, substitute_functions, FuncDef, Substitution};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("division by an expression that normalizes to zero")]
    DivisionByZero,
    #[error("exponent is not a polynomial in constant symbols")]
    UnsupportedExponent,
    #[error("expression contains unresolved t-derivatives of fields")]
    TimeDerivative,
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at offset {pos}")]
    UnknownIdentifier { name: String, pos: usize },
}

/// Canonical form of `e`. Expressions are always stored canonically, so this
/// is the identity; it exists so call sites can say what they mean.
pub fn normalize(e: &Expr) -> Expr {
    e.clone()
}

pub fn is_zero(e: &Expr) -> bool {
    e.is_zero()
}
