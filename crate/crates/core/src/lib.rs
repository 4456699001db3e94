//! Core of the rtr checker: an occurrence typing system where typing
//! produces a type, a pair of propositions describing what each truthiness
//! outcome implies, and a symbolic object; a logic over those propositions
//! with pluggable linear integer arithmetic; refinement types discharged
//! through the logic; and a big-step evaluator with the model relation
//! connecting the two.

pub mod ast;
pub mod checker;
pub mod display;
pub mod eval;
pub mod lia;
pub mod prims;
pub mod prover;
pub mod subtype;

pub use ast::{
    lift_subst, normalize_obj, subst_obj, subst_prop, subst_result, subst_type, Env, Expr,
    ExprKind, Field, Name, Obj, Prop, RuntimeEnv, Span, Type, TypeResult, Value,
};
pub use checker::{check, check_against, result_type_erased, CheckOutcome, Diagnostic};
pub use eval::{denote, eval, satisfies, satisfies_all, value_type, EvalOutcome, StuckError};
pub use prims::{delta_apply, delta_type, PrimOp};
pub use prover::{env_from_props, overlap, remove, restrict, update, Config, HybridEnv, Polarity};
pub use subtype::{subobj, subresult, subtype};
