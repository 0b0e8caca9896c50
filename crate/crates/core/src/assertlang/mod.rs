//! Assertions over classical states and over distributions of quantum
//! states.

pub mod ast;
pub mod eval;
pub mod parser;
pub mod printer;
pub mod subst;

pub use ast::{CmpOp, DistAssn, DistExpr, MeasSpec, Quant, StateAssn, StateExpr};
pub use eval::{
    box_equiv_check, box_holds, compare, eval_dist_expr, eval_state_assn, eval_state_expr, holds, BoxEquivalence,
    DistValue, Truth,
};
pub use parser::{parse_assertion, parse_dist_expr, parse_state_assertion, ASSN_KEYWORDS};
pub use printer::{pretty_assn, pretty_dist_expr, pretty_measurement_literal, pretty_state_assn, pretty_state_expr};
pub use subst::{BoundPolicy, FreshVars, FRESH_PREFIX};
