//! Big-step evaluation, the model relation between runtime environments
//! and propositions, and value typing (including closures).
//!
//! Evaluation is fuel-bounded: the budget only decides between completing
//! and reporting exhaustion, never which value is produced. Stuck states
//! (applying a non-function, projecting a non-pair, a primitive outside
//! its domain) are reported as distinguished errors; terms accepted by the
//! checker never reach them.

use num_bigint::BigInt;

use crate::ast::{Expr, ExprKind, Field, Obj, Prop, RuntimeEnv, Span, Type, TypeResult, Value};
use crate::checker;
use crate::prims::{delta_apply, delta_type};
use crate::prover::{env_from_props, int_equality_props, no_overlap, Config, HybridEnv};
use crate::subtype::subtype;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StuckError {
    pub span: Span,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalOutcome {
    Value(Value),
    Stuck(StuckError),
    FuelExhausted,
}

impl EvalOutcome {
    pub fn value(self) -> Option<Value> {
        match self {
            EvalOutcome::Value(v) => Some(v),
            _ => None,
        }
    }
}

enum Stop {
    Stuck(StuckError),
    Fuel,
}

/// Evaluate `e` under `rho` with a step budget.
pub fn eval(rho: &RuntimeEnv, e: &Expr, fuel: u64) -> EvalOutcome {
    let mut fuel = fuel;
    match eval_inner(rho, e, &mut fuel) {
        Ok(v) => EvalOutcome::Value(v),
        Err(Stop::Stuck(s)) => EvalOutcome::Stuck(s),
        Err(Stop::Fuel) => EvalOutcome::FuelExhausted,
    }
}

fn stuck(span: Span, reason: impl Into<String>) -> Stop {
    Stop::Stuck(StuckError {
        span,
        reason: reason.into(),
    })
}

fn eval_inner(rho: &RuntimeEnv, e: &Expr, fuel: &mut u64) -> Result<Value, Stop> {
    if *fuel == 0 {
        return Err(Stop::Fuel);
    }
    *fuel -= 1;
    match &e.kind {
        ExprKind::Var(x) => rho
            .get(x)
            .cloned()
            .ok_or_else(|| stuck(e.span, format!("unbound variable `{x}`"))),
        ExprKind::Int(n) => Ok(Value::Int(n.clone())),
        ExprKind::True => Ok(Value::True),
        ExprKind::False => Ok(Value::False),
        ExprKind::Prim(p) => Ok(Value::Prim(*p)),
        ExprKind::Abs {
            param,
            param_ty,
            body,
        } => {
            // Capture only what the abstraction actually mentions.
            let mut needed = std::collections::BTreeSet::new();
            e.free_vars(&mut needed);
            let captured: RuntimeEnv = rho
                .iter()
                .filter(|(k, _)| needed.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            Ok(Value::Closure {
                env: captured,
                param: param.clone(),
                param_ty: param_ty.clone(),
                body: (**body).clone(),
            })
        }
        ExprKind::App(f, a) => {
            let vf = eval_inner(rho, f, fuel)?;
            let va = eval_inner(rho, a, fuel)?;
            match vf {
                Value::Closure {
                    env, param, body, ..
                } => {
                    let mut inner = env;
                    inner.insert(param, va);
                    eval_inner(&inner, &body, fuel)
                }
                Value::Prim(p) => {
                    delta_apply(p, &va).map_err(|err| stuck(e.span, format!("{}: {}", p, err.reason)))
                }
                other => Err(stuck(
                    f.span,
                    format!("application of a non-function value {other}"),
                )),
            }
        }
        ExprKind::If(c, t, el) => {
            let vc = eval_inner(rho, c, fuel)?;
            if vc.is_false() {
                eval_inner(rho, el, fuel)
            } else {
                eval_inner(rho, t, fuel)
            }
        }
        ExprKind::Let { name, bound, body } => {
            let vb = eval_inner(rho, bound, fuel)?;
            let mut inner = rho.clone();
            inner.insert(name.clone(), vb);
            eval_inner(&inner, body, fuel)
        }
        ExprKind::Cons(a, b) => {
            let va = eval_inner(rho, a, fuel)?;
            let vb = eval_inner(rho, b, fuel)?;
            Ok(Value::pair(va, vb))
        }
        ExprKind::Fst(inner) => match eval_inner(rho, inner, fuel)? {
            Value::Pair(a, _) => Ok(*a),
            other => Err(stuck(
                inner.span,
                format!("fst of a non-pair value {other}"),
            )),
        },
        ExprKind::Snd(inner) => match eval_inner(rho, inner, fuel)? {
            Value::Pair(_, b) => Ok(*b),
            other => Err(stuck(
                inner.span,
                format!("snd of a non-pair value {other}"),
            )),
        },
        ExprKind::VecLit(items) => {
            let mut out = Vec::with_capacity(items.len());
            for item in items {
                match eval_inner(rho, item, fuel)? {
                    Value::Int(n) => out.push(n),
                    other => {
                        return Err(stuck(
                            item.span,
                            format!("vector element is not an integer: {other}"),
                        ))
                    }
                }
            }
            Ok(Value::Vector(out))
        }
    }
}

/// The denotation of a symbolic object under a runtime environment.
pub fn denote(rho: &RuntimeEnv, o: &Obj) -> Option<Value> {
    match o {
        Obj::Null => None,
        Obj::Var(x) => rho.get(x).cloned(),
        Obj::Field(f, base) => match (f, denote(rho, base)?) {
            (Field::Fst, Value::Pair(a, _)) => Some(*a),
            (Field::Snd, Value::Pair(_, b)) => Some(*b),
            (Field::Len, Value::Vector(items)) => Some(Value::Int(BigInt::from(items.len()))),
            _ => None,
        },
        Obj::Pair(a, b) => Some(Value::pair(denote(rho, a)?, denote(rho, b)?)),
        Obj::Linear(l) => {
            let mut acc = l.constant.clone();
            for (base, coeff) in &l.terms {
                match denote(rho, base)? {
                    Value::Int(n) => acc += coeff * n,
                    _ => return None,
                }
            }
            Some(Value::Int(acc))
        }
    }
}

/// The most specific structural type of a closed value. Closures are typed
/// by re-checking their abstraction under an environment synthesized from
/// the captured bindings.
pub fn synth_value_type(v: &Value) -> Type {
    match v {
        Value::Int(_) => Type::Int,
        Value::True => Type::True,
        Value::False => Type::False,
        Value::Prim(p) => delta_type(*p),
        Value::Pair(a, b) => Type::pair(synth_value_type(a), synth_value_type(b)),
        Value::Vector(_) => Type::Vec,
        Value::Closure {
            env, param, param_ty, body,
        } => closure_fun_type(env, param, param_ty, body).unwrap_or(Type::Top),
    }
}

/// Shallow tag-level type, used for the non-overlap side of the model
/// relation. Closures all share the function tag.
fn synth_shallow(v: &Value) -> Type {
    match v {
        Value::Int(_) => Type::Int,
        Value::True => Type::True,
        Value::False => Type::False,
        Value::Prim(_) | Value::Closure { .. } => {
            Type::fun("x", Type::Top, TypeResult::plain(Type::Top))
        }
        Value::Pair(a, b) => Type::pair(synth_shallow(a), synth_shallow(b)),
        Value::Vector(_) => Type::Vec,
    }
}

/// The propositions justified by a captured runtime environment: each
/// binding contributes its synthesized type, and integer and vector
/// bindings additionally contribute theory facts. The source environment
/// satisfies every produced proposition.
pub fn runtime_env_props(rho: &RuntimeEnv) -> Vec<Prop> {
    let mut props = Vec::new();
    for (x, v) in rho {
        let xv = Obj::var(x.clone());
        props.push(Prop::is_type(xv.clone(), synth_value_type(v)));
        match v {
            Value::Int(n) => props.extend(int_equality_props(&xv, n)),
            Value::Vector(items) => {
                let len = Obj::field(Field::Len, xv);
                let k = Obj::int(items.len() as i64);
                props.push(Prop::leq(len.clone(), k.clone()));
                props.push(Prop::leq(k, len));
            }
            _ => {}
        }
    }
    props
}

pub fn env_of_runtime(rho: &RuntimeEnv) -> HybridEnv {
    env_from_props(Config::default(), &runtime_env_props(rho))
}

fn closure_fun_type(env: &RuntimeEnv, param: &str, param_ty: &Type, body: &Expr) -> Option<Type> {
    let lam = Expr::synthetic(ExprKind::Abs {
        param: param.to_string(),
        param_ty: param_ty.clone(),
        body: Box::new(body.clone()),
    });
    let genv = env_of_runtime(env);
    match checker::check(&genv, &lam) {
        Ok(TypeResult::Result { ty, .. }) => Some(ty),
        _ => None,
    }
}

/// Decide whether a closed value inhabits a type.
pub fn value_type(v: &Value, t: &Type) -> bool {
    match t {
        Type::Top => true,
        Type::Int => matches!(v, Value::Int(_)),
        Type::True => matches!(v, Value::True),
        Type::False => matches!(v, Value::False),
        Type::Vec => matches!(v, Value::Vector(_)),
        Type::Union(ms) => ms.iter().any(|m| value_type(v, m)),
        Type::Pair(a, b) => match v {
            Value::Pair(va, vb) => value_type(va, a) && value_type(vb, b),
            _ => false,
        },
        Type::Refine { var, base, prop } => {
            if !value_type(v, base) {
                return false;
            }
            let mut rho = RuntimeEnv::new();
            rho.insert(var.clone(), v.clone());
            satisfies(&rho, prop)
        }
        Type::Fun { .. } => match v {
            Value::Prim(p) => subtype(&HybridEnv::default(), &delta_type(*p), t),
            Value::Closure {
                env,
                param,
                param_ty,
                body,
            } => {
                let genv = env_of_runtime(env);
                let lam = Expr::synthetic(ExprKind::Abs {
                    param: param.clone(),
                    param_ty: param_ty.clone(),
                    body: Box::new(body.clone()),
                });
                match checker::check(&genv, &lam) {
                    Ok(TypeResult::Result { ty, .. }) => subtype(&genv, &ty, t),
                    _ => false,
                }
            }
            _ => false,
        },
    }
}

/// The negative side of the model relation: the value's type does not
/// overlap the tested type.
pub fn value_not_type(v: &Value, t: &Type) -> bool {
    no_overlap(&synth_shallow(v), t)
}

/// The model relation: does the runtime environment satisfy the
/// proposition? Denotation failures make atoms unsatisfied.
pub fn satisfies(rho: &RuntimeEnv, prop: &Prop) -> bool {
    match prop {
        Prop::TT => true,
        Prop::FF => false,
        Prop::And(a, b) => satisfies(rho, a) && satisfies(rho, b),
        Prop::Or(a, b) => satisfies(rho, a) || satisfies(rho, b),
        Prop::IsType(o, t) => match denote(rho, o) {
            Some(v) => value_type(&v, t),
            None => false,
        },
        Prop::NotType(o, t) => match denote(rho, o) {
            Some(v) => value_not_type(&v, t),
            None => false,
        },
        Prop::Alias(a, b) => match (denote(rho, a), denote(rho, b)) {
            (Some(va), Some(vb)) => va == vb,
            _ => false,
        },
        Prop::Leq(a, b) | Prop::Lt(a, b) => {
            let strict = matches!(prop, Prop::Lt(_, _));
            match (denote(rho, a), denote(rho, b)) {
                (Some(Value::Int(x)), Some(Value::Int(y))) => {
                    if strict {
                        x < y
                    } else {
                        x <= y
                    }
                }
                _ => false,
            }
        }
    }
}

/// Pointwise satisfaction of an environment of propositions.
pub fn satisfies_all(rho: &RuntimeEnv, props: &[Prop]) -> bool {
    props.iter().all(|p| satisfies(rho, p))
}

/// Clause one of the correspondence between results and values: every
/// non-null structural part of the object denotes, under `rho`, the
/// matching part of the value.
pub fn object_matches_value(rho: &RuntimeEnv, o: &Obj, v: &Value) -> bool {
    match o {
        Obj::Null => true,
        Obj::Pair(oa, ob) => match v {
            Value::Pair(va, vb) => {
                object_matches_value(rho, oa, va) && object_matches_value(rho, ob, vb)
            }
            _ => false,
        },
        _ => denote(rho, o).as_ref() == Some(v),
    }
}

/// Default per-term step budget used by the driver.
pub const DEFAULT_FUEL: u64 = 100_000;
