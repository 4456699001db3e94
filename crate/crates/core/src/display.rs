//! Rendering of every syntactic category in the surface s-expression
//! syntax. The printer and the CLI parser round-trip: parsing a rendered
//! form yields the same tree.

use std::fmt;

use num_traits::{One, Zero};

use crate::ast::{Expr, ExprKind, Obj, Prop, Type, TypeResult, Value};

impl fmt::Display for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obj::Null => write!(f, "null"),
            Obj::Var(x) => write!(f, "{x}"),
            Obj::Field(field, o) => write!(f, "({field} {o})"),
            // Pair objects have no surface form; this rendering is for
            // diagnostics only.
            Obj::Pair(a, b) => write!(f, "(pair {a} {b})"),
            Obj::Linear(l) => {
                if l.terms.is_empty() {
                    return write!(f, "{}", l.constant);
                }
                let mut rendered: Option<String> = None;
                for (base, coeff) in &l.terms {
                    let term = if coeff.is_one() {
                        base.to_string()
                    } else {
                        format!("(* {coeff} {base})")
                    };
                    rendered = Some(match rendered {
                        None => term,
                        Some(acc) => format!("(+ {acc} {term})"),
                    });
                }
                let body = rendered.unwrap();
                if l.constant.is_zero() {
                    write!(f, "{body}")
                } else {
                    write!(f, "(+ {body} {})", l.constant)
                }
            }
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Top => write!(f, "Top"),
            Type::Int => write!(f, "Int"),
            Type::True => write!(f, "True"),
            Type::False => write!(f, "False"),
            Type::Vec => write!(f, "Vec"),
            Type::Pair(a, b) => write!(f, "(Pair {a} {b})"),
            Type::Union(ms) => {
                if *self == Type::bool() {
                    return write!(f, "Bool");
                }
                write!(f, "(U")?;
                for m in ms {
                    write!(f, " {m}")?;
                }
                write!(f, ")")
            }
            Type::Fun {
                param,
                domain,
                range,
            } => write!(f, "(-> ({param} : {domain}) {range})"),
            Type::Refine { var, base, prop } => {
                write!(f, "(Refine ({var} : {base}) {prop})")
            }
        }
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prop::TT => write!(f, "tt"),
            Prop::FF => write!(f, "ff"),
            Prop::IsType(o, t) => write!(f, "(: {o} {t})"),
            Prop::NotType(o, t) => write!(f, "(! {o} {t})"),
            Prop::And(a, b) => write!(f, "(and {a} {b})"),
            Prop::Or(a, b) => write!(f, "(or {a} {b})"),
            Prop::Alias(a, b) => write!(f, "(== {a} {b})"),
            Prop::Leq(a, b) => write!(f, "(<= {a} {b})"),
            Prop::Lt(a, b) => write!(f, "(< {a} {b})"),
        }
    }
}

impl fmt::Display for TypeResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeResult::Result {
                ty,
                then_prop,
                else_prop,
                obj,
            } => {
                if *then_prop == Prop::TT && *else_prop == Prop::TT && obj.is_null() {
                    write!(f, "{ty}")
                } else {
                    write!(f, "(Result {ty} {then_prop} {else_prop} {obj})")
                }
            }
            // No surface form; diagnostics only.
            TypeResult::Exists { var, ty, body } => {
                write!(f, "(Exists ({var} : {ty}) {body})")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Var(x) => write!(f, "{x}"),
            ExprKind::Int(n) => write!(f, "{n}"),
            ExprKind::True => write!(f, "true"),
            ExprKind::False => write!(f, "false"),
            ExprKind::Prim(p) => write!(f, "{p}"),
            ExprKind::Abs {
                param,
                param_ty,
                body,
            } => write!(f, "(lambda ({param} : {param_ty}) {body})"),
            ExprKind::App(g, a) => write!(f, "({g} {a})"),
            ExprKind::If(c, t, e) => write!(f, "(if {c} {t} {e})"),
            ExprKind::Let { name, bound, body } => {
                write!(f, "(let ({name} {bound}) {body})")
            }
            ExprKind::Cons(a, b) => write!(f, "(cons {a} {b})"),
            ExprKind::Fst(e) => write!(f, "(fst {e})"),
            ExprKind::Snd(e) => write!(f, "(snd {e})"),
            ExprKind::VecLit(items) => {
                write!(f, "(vec")?;
                for item in items {
                    write!(f, " {item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::True => write!(f, "true"),
            Value::False => write!(f, "false"),
            Value::Prim(p) => write!(f, "{p}"),
            Value::Pair(a, b) => write!(f, "(cons {a} {b})"),
            Value::Closure { .. } => write!(f, "#<closure>"),
            Value::Vector(items) => {
                write!(f, "(vec")?;
                for item in items {
                    write!(f, " {item}")?;
                }
                write!(f, ")")
            }
        }
    }
}
