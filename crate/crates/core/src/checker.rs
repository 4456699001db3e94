//! The algorithmic typing judgment: synthesis of type-results with
//! subsumption inlined, existential binders propagated upward, and
//! annotation checking that distributes expected types through
//! conditionals, bindings, and abstractions.
//!
//! Checking a synthesized result against an expected type uses the
//! result's symbolic object when it has one: the goal `o ∈ τ` is handed to
//! the prover, which is what lets refinement-typed ranges pick up facts
//! learned from enclosing conditionals. A plain type-to-type subtyping
//! query cannot see those facts, so the object route is tried whenever
//! subtyping fails.

use std::collections::BTreeSet;

use crate::ast::{
    lift_subst, subst_result, Expr, ExprKind, Field, Name, Obj, Prop, Span, Type, TypeResult,
};
use crate::prims::delta_type;
use crate::prover::HybridEnv;
use crate::subtype::{subobj, subtype};

/// A failed check, carrying the exact query that failed for reproduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: Span,
    pub message: String,
    pub expected: Option<String>,
    pub actual: Option<String>,
    pub query: Option<String>,
}

impl Diagnostic {
    fn new(span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            span,
            message: message.into(),
            expected: None,
            actual: None,
            query: None,
        }
    }

    fn with_types(mut self, expected: &Type, actual: &Type) -> Diagnostic {
        self.expected = Some(expected.to_string());
        self.actual = Some(actual.to_string());
        self
    }

    fn with_query(mut self, query: impl Into<String>) -> Diagnostic {
        self.query = Some(query.into());
        self
    }
}

pub type CheckOutcome = Result<TypeResult, Diagnostic>;

/// Synthesize a type-result for `e` under `env`.
pub fn check(env: &HybridEnv, e: &Expr) -> CheckOutcome {
    let mut ck = Checker::new(env);
    ck.synth(env, e)
}

/// Check `e` against an expected type, distributing through conditionals,
/// let bindings, and abstractions.
pub fn check_against(env: &HybridEnv, e: &Expr, expected: &Type) -> Result<(), Diagnostic> {
    let mut ck = Checker::new(env);
    ck.check_result(env, e, &TypeResult::plain(expected.clone()))
}

struct Checker {
    fresh: u64,
    trace: bool,
}

/// A result with its existential binders peeled into the environment.
struct Plain {
    ty: Type,
    then_prop: Prop,
    else_prop: Prop,
    obj: Obj,
}

enum Branch {
    Dead,
    Live(Plain),
}

impl Checker {
    fn new(env: &HybridEnv) -> Checker {
        Checker {
            fresh: 0,
            trace: env.config().trace,
        }
    }

    fn fresh_var(&mut self, hint: &str) -> Name {
        let base = hint.split('%').next().unwrap_or("x");
        let base = if base.is_empty() { "x" } else { base };
        let n = self.fresh;
        self.fresh += 1;
        format!("{base}%{n}")
    }

    fn trace_rule(&self, rule: &str, e: &Expr) {
        if self.trace {
            println!("[rule] {rule}: {e}");
        }
    }

    /// Peel existential binders off a result, freshening each and assuming
    /// it into the environment. Binders accumulate for re-wrapping.
    fn peel(
        &mut self,
        env: &HybridEnv,
        r: TypeResult,
        binders: &mut Vec<(Name, Type)>,
    ) -> (HybridEnv, Plain) {
        let mut env = env.clone();
        let mut cur = r;
        loop {
            match cur {
                TypeResult::Exists { var, ty, body } => {
                    let fresh = self.fresh_var(&var);
                    let renamed = subst_result(&body, &var, &Obj::var(fresh.clone()));
                    env = env.assume(&Prop::is_type(Obj::var(fresh.clone()), ty.clone()));
                    binders.push((fresh, ty));
                    cur = renamed;
                }
                TypeResult::Result {
                    ty,
                    then_prop,
                    else_prop,
                    obj,
                } => {
                    return (
                        env,
                        Plain {
                            ty,
                            then_prop,
                            else_prop,
                            obj,
                        },
                    )
                }
            }
        }
    }

    /// Re-wrap peeled binders around a result, dropping binders the result
    /// no longer mentions.
    fn wrap(binders: Vec<(Name, Type)>, result: TypeResult) -> TypeResult {
        let mut out = result;
        let mut needed = BTreeSet::new();
        out.free_vars(&mut needed);
        for (x, ty) in binders.into_iter().rev() {
            if needed.contains(&x) {
                needed.remove(&x);
                ty.free_vars(&mut needed);
                out = TypeResult::exists(x, ty, out);
            }
        }
        out
    }

    // ------------------------------------------------------------------
    // synthesis
    // ------------------------------------------------------------------

    fn synth(&mut self, env: &HybridEnv, e: &Expr) -> CheckOutcome {
        match &e.kind {
            ExprKind::Int(n) => {
                self.trace_rule("T-Int", e);
                Ok(TypeResult::result(
                    Type::Int,
                    Prop::TT,
                    Prop::FF,
                    Obj::int(n.clone()),
                ))
            }
            ExprKind::True => {
                self.trace_rule("T-True", e);
                Ok(TypeResult::result(Type::True, Prop::TT, Prop::FF, Obj::Null))
            }
            ExprKind::False => {
                self.trace_rule("T-False", e);
                Ok(TypeResult::result(Type::False, Prop::FF, Prop::TT, Obj::Null))
            }
            ExprKind::Prim(p) => {
                self.trace_rule("T-Prim", e);
                Ok(TypeResult::result(
                    delta_type(*p),
                    Prop::TT,
                    Prop::FF,
                    Obj::Null,
                ))
            }
            ExprKind::Var(x) => {
                self.trace_rule("T-Var", e);
                if !env.is_bound(x) {
                    return Err(Diagnostic::new(e.span, format!("unbound variable `{x}`")));
                }
                let ty = env.lookup_positive(&Obj::var(x.clone())).unwrap_or(Type::Top);
                Ok(TypeResult::result(
                    ty,
                    Prop::not_type(Obj::var(x.clone()), Type::False),
                    Prop::is_type(Obj::var(x.clone()), Type::False),
                    Obj::var(x.clone()),
                ))
            }
            ExprKind::Abs {
                param,
                param_ty,
                body,
            } => {
                self.trace_rule("T-Abs", e);
                let inner = env.assume(&Prop::is_type(Obj::var(param.clone()), param_ty.clone()));
                let range = self.synth(&inner, body)?;
                Ok(TypeResult::result(
                    Type::fun(param.clone(), param_ty.clone(), range),
                    Prop::TT,
                    Prop::FF,
                    Obj::Null,
                ))
            }
            ExprKind::App(f, a) => {
                self.trace_rule("T-App", e);
                let mut binders = Vec::new();
                let rf = self.synth(env, f)?;
                let (env1, pf) = self.peel(env, rf, &mut binders);
                let ra = self.synth(&env1, a)?;
                let (env2, pa) = self.peel(&env1, ra, &mut binders);
                let result =
                    self.apply_operator(&env2, &pf.ty, &pa, f.span, a.span, &mut binders)?;
                Ok(Self::wrap(binders, result))
            }
            ExprKind::If(c, t, el) => {
                self.trace_rule("T-If", e);
                let mut binders = Vec::new();
                let rc = self.synth(env, c)?;
                let (env1, pc) = self.peel(env, rc, &mut binders);
                let then_env = env1.assume(&pc.then_prop);
                let else_env = env1.assume(&pc.else_prop);
                let then_branch = self.synth_branch(&then_env, t, &mut binders)?;
                let else_branch = self.synth_branch(&else_env, el, &mut binders)?;
                let joined = join(&pc, then_branch, else_branch);
                Ok(Self::wrap(binders, joined))
            }
            ExprKind::Let { name, bound, body } => {
                self.trace_rule("T-Let", e);
                let mut binders = Vec::new();
                let rb = self.synth(env, bound)?;
                let (env1, pb) = self.peel(env, rb, &mut binders);
                let body_env = self.bind_let(&env1, name, &pb);
                let rbody = self.synth(&body_env, body)?;
                let result = lift_subst(&rbody, name, &pb.obj, &pb.ty);
                Ok(Self::wrap(binders, result))
            }
            ExprKind::Cons(a, b) => {
                self.trace_rule("T-Cons", e);
                let mut binders = Vec::new();
                let ra = self.synth(env, a)?;
                let (env1, p1) = self.peel(env, ra, &mut binders);
                let rb = self.synth(&env1, b)?;
                let (_env2, p2) = self.peel(&env1, rb, &mut binders);
                let result = TypeResult::result(
                    Type::pair(p1.ty, p2.ty),
                    Prop::TT,
                    Prop::FF,
                    Obj::pair(p1.obj, p2.obj),
                );
                Ok(Self::wrap(binders, result))
            }
            ExprKind::Fst(inner) => self.project(env, e, inner, Field::Fst),
            ExprKind::Snd(inner) => self.project(env, e, inner, Field::Snd),
            ExprKind::VecLit(items) => {
                self.trace_rule("T-Vec", e);
                let mut binders = Vec::new();
                let mut env = env.clone();
                for item in items {
                    let ri = self.synth(&env, item)?;
                    let (env1, pi) = self.peel(&env, ri, &mut binders);
                    env = env1;
                    self.fits_type(&env, &pi, &Type::Int, item.span)?;
                }
                let xi = self.fresh_var("v");
                let w = self.fresh_var("w");
                let len_w = Obj::field(Field::Len, Obj::var(w.clone()));
                let len_ty = Type::refine(
                    w,
                    Type::Vec,
                    Prop::and(
                        Prop::leq(len_w.clone(), Obj::int(items.len() as i64)),
                        Prop::leq(Obj::int(items.len() as i64), len_w),
                    ),
                );
                let result = TypeResult::exists(
                    xi.clone(),
                    len_ty,
                    TypeResult::result(Type::Vec, Prop::TT, Prop::FF, Obj::var(xi)),
                );
                Ok(Self::wrap(binders, result))
            }
        }
    }

    fn synth_branch(
        &mut self,
        env: &HybridEnv,
        e: &Expr,
        binders: &mut Vec<(Name, Type)>,
    ) -> Result<Branch, Diagnostic> {
        if env.is_absurd() {
            return Ok(Branch::Dead);
        }
        let r = self.synth(env, e)?;
        let (_env, plain) = self.peel(env, r, binders);
        Ok(Branch::Live(plain))
    }

    fn project(&mut self, env: &HybridEnv, whole: &Expr, inner: &Expr, f: Field) -> CheckOutcome {
        self.trace_rule(if f == Field::Fst { "T-Fst" } else { "T-Snd" }, whole);
        let mut binders = Vec::new();
        let r = self.synth(env, inner)?;
        let (_env1, p) = self.peel(env, r, &mut binders);
        let Some((ta, tb)) = as_pair(&p.ty) else {
            return Err(
                Diagnostic::new(inner.span, "projection from a non-pair".to_string())
                    .with_types(&Type::pair(Type::Top, Type::Top), &p.ty),
            );
        };
        let ty = if f == Field::Fst { ta } else { tb };
        let obj = Obj::field(f, p.obj);
        let result = TypeResult::result(
            ty,
            Prop::not_type(obj.clone(), Type::False),
            Prop::is_type(obj.clone(), Type::False),
            obj,
        );
        Ok(Self::wrap(binders, result))
    }

    fn bind_let(&mut self, env: &HybridEnv, name: &str, bound: &Plain) -> HybridEnv {
        let xv = Obj::var(name.to_string());
        let mut out = env.assume(&Prop::is_type(xv.clone(), bound.ty.clone()));
        out = out.assume(&Prop::alias(xv.clone(), bound.obj.clone()));
        if !(bound.then_prop == Prop::TT && bound.else_prop == Prop::TT) {
            let cond = Prop::or(
                Prop::and(
                    Prop::is_type(xv.clone(), Type::False),
                    bound.else_prop.clone(),
                ),
                Prop::and(Prop::not_type(xv, Type::False), bound.then_prop.clone()),
            );
            out = out.assume(&cond);
        }
        out
    }

    /// Apply an operator of the given type to an operand. Unions of
    /// function types apply when the operand fits every member's domain;
    /// the instantiated ranges join as in a conditional.
    fn apply_operator(
        &mut self,
        env: &HybridEnv,
        op_ty: &Type,
        operand: &Plain,
        op_span: Span,
        arg_span: Span,
        binders: &mut Vec<(Name, Type)>,
    ) -> Result<TypeResult, Diagnostic> {
        if let Some((param, domain, range)) = as_function(op_ty) {
            self.fits_type(env, operand, &domain, arg_span)?;
            return Ok(lift_subst(&range, &param, &operand.obj, &operand.ty));
        }
        if let Type::Union(ms) = op_ty {
            if !ms.is_empty() && ms.iter().all(function_shaped) {
                let mut joined: Option<Plain> = None;
                for m in ms {
                    let r = self.apply_operator(env, m, operand, op_span, arg_span, binders)?;
                    let (_branch_env, p) = self.peel(env, r, binders);
                    joined = Some(match joined {
                        None => p,
                        Some(acc) => Plain {
                            ty: Type::union(vec![acc.ty, p.ty]),
                            then_prop: Prop::or(acc.then_prop, p.then_prop),
                            else_prop: Prop::or(acc.else_prop, p.else_prop),
                            obj: if acc.obj == p.obj { acc.obj } else { Obj::Null },
                        },
                    });
                }
                let p = joined.unwrap();
                return Ok(TypeResult::result(p.ty, p.then_prop, p.else_prop, p.obj));
            }
        }
        Err(
            Diagnostic::new(op_span, "application of a non-function".to_string()).with_types(
                &Type::fun("x", Type::bottom(), TypeResult::plain(Type::Top)),
                op_ty,
            ),
        )
    }

    /// The inlined subsumption check of a synthesized result against an
    /// expected type: plain subtyping first, then the object route through
    /// the prover.
    fn fits_type(
        &mut self,
        env: &HybridEnv,
        actual: &Plain,
        expected: &Type,
        span: Span,
    ) -> Result<(), Diagnostic> {
        if subtype(env, &actual.ty, expected) {
            return Ok(());
        }
        if !actual.obj.is_null() {
            let with_fact = env.assume(&Prop::is_type(actual.obj.clone(), actual.ty.clone()));
            let goal = Prop::is_type(actual.obj.clone(), expected.clone());
            if self.trace {
                println!("[query] {goal}");
            }
            if with_fact.proves(&goal) {
                return Ok(());
            }
            return Err(Diagnostic::new(span, "type mismatch".to_string())
                .with_types(expected, &actual.ty)
                .with_query(goal.to_string()));
        }
        Err(Diagnostic::new(span, "type mismatch".to_string())
            .with_types(expected, &actual.ty)
            .with_query(format!("{} <: {}", actual.ty, expected)))
    }

    // ------------------------------------------------------------------
    // checking against an expected result
    // ------------------------------------------------------------------

    fn check_result(
        &mut self,
        env: &HybridEnv,
        e: &Expr,
        expected: &TypeResult,
    ) -> Result<(), Diagnostic> {
        let TypeResult::Result {
            ty: exp_ty,
            then_prop: exp_then,
            else_prop: exp_else,
            obj: exp_obj,
        } = expected
        else {
            return Err(Diagnostic::new(
                e.span,
                "cannot check against an existential result".to_string(),
            ));
        };
        match &e.kind {
            ExprKind::If(c, t, el) => {
                let mut binders = Vec::new();
                let rc = self.synth(env, c)?;
                let (env1, pc) = self.peel(env, rc, &mut binders);
                let then_env = env1.assume(&pc.then_prop);
                if !then_env.is_absurd() {
                    self.check_result(&then_env, t, expected)?;
                }
                let else_env = env1.assume(&pc.else_prop);
                if !else_env.is_absurd() {
                    self.check_result(&else_env, el, expected)?;
                }
                Ok(())
            }
            ExprKind::Let { name, bound, body } => {
                let mut binders = Vec::new();
                let rb = self.synth(env, bound)?;
                let (env1, pb) = self.peel(env, rb, &mut binders);
                let body_env = self.bind_let(&env1, name, &pb);
                self.check_result(&body_env, body, expected)
            }
            ExprKind::Abs {
                param,
                param_ty,
                body,
            } if matches!(exp_ty, Type::Fun { .. })
                && *exp_then == Prop::TT
                && *exp_else == Prop::TT
                && exp_obj.is_null() =>
            {
                let Type::Fun {
                    param: ann_param,
                    domain,
                    range,
                } = exp_ty
                else {
                    unreachable!()
                };
                if !subtype(env, domain, param_ty) {
                    return Err(Diagnostic::new(
                        e.span,
                        format!("annotated domain is not accepted by parameter `{param}`"),
                    )
                    .with_types(param_ty, domain));
                }
                let inner =
                    env.assume(&Prop::is_type(Obj::var(param.clone()), (**domain).clone()));
                let expected_range = subst_result(range, ann_param, &Obj::var(param.clone()));
                self.check_result(&inner, body, &expected_range)
            }
            _ => {
                let mut binders = Vec::new();
                let r = self.synth(env, e)?;
                let (env1, p) = self.peel(env, r, &mut binders);
                self.fits_type(&env1, &p, exp_ty, e.span)?;
                if *exp_then != Prop::TT {
                    let then_env = env1.assume(&p.then_prop);
                    if !then_env.proves(exp_then) {
                        return Err(Diagnostic::new(e.span, "then-proposition not provable")
                            .with_query(exp_then.to_string()));
                    }
                }
                if *exp_else != Prop::TT {
                    let else_env = env1.assume(&p.else_prop);
                    if !else_env.proves(exp_else) {
                        return Err(Diagnostic::new(e.span, "else-proposition not provable")
                            .with_query(exp_else.to_string()));
                    }
                }
                if !subobj(&env1, &p.obj, exp_obj) {
                    return Err(Diagnostic::new(e.span, "object mismatch")
                        .with_query(format!("{} <: {}", p.obj, exp_obj)));
                }
                Ok(())
            }
        }
    }
}

fn join(test: &Plain, then_branch: Branch, else_branch: Branch) -> TypeResult {
    match (then_branch, else_branch) {
        (Branch::Dead, Branch::Dead) => {
            TypeResult::result(Type::bottom(), Prop::FF, Prop::FF, Obj::Null)
        }
        (Branch::Dead, Branch::Live(p)) => TypeResult::result(
            p.ty,
            Prop::and(test.else_prop.clone(), p.then_prop),
            Prop::and(test.else_prop.clone(), p.else_prop),
            p.obj,
        ),
        (Branch::Live(p), Branch::Dead) => TypeResult::result(
            p.ty,
            Prop::and(test.then_prop.clone(), p.then_prop),
            Prop::and(test.then_prop.clone(), p.else_prop),
            p.obj,
        ),
        (Branch::Live(p2), Branch::Live(p3)) => {
            let ty = Type::union(vec![p2.ty, p3.ty]);
            let then_prop = Prop::or(
                Prop::and(test.then_prop.clone(), p2.then_prop),
                Prop::and(test.else_prop.clone(), p3.then_prop),
            );
            let else_prop = Prop::or(
                Prop::and(test.then_prop.clone(), p2.else_prop),
                Prop::and(test.else_prop.clone(), p3.else_prop),
            );
            let obj = if p2.obj == p3.obj { p2.obj } else { Obj::Null };
            TypeResult::result(ty, then_prop, else_prop, obj)
        }
    }
}

/// Look through refinements for the underlying function type.
fn as_function(t: &Type) -> Option<(Name, Type, TypeResult)> {
    match t {
        Type::Fun {
            param,
            domain,
            range,
        } => Some((param.clone(), (**domain).clone(), (**range).clone())),
        Type::Refine { base, .. } => as_function(base),
        _ => None,
    }
}

fn function_shaped(t: &Type) -> bool {
    match t {
        Type::Union(ms) => !ms.is_empty() && ms.iter().all(function_shaped),
        _ => as_function(t).is_some(),
    }
}

/// Look through refinements for the underlying pair type.
fn as_pair(t: &Type) -> Option<(Type, Type)> {
    match t {
        Type::Pair(a, b) => Some(((**a).clone(), (**b).clone())),
        Type::Refine { base, .. } => as_pair(base),
        _ => None,
    }
}

/// The existential-free weakening of a result's type: binders are peeled
/// and any component whose propositions mention a peeled binder is erased
/// to a sound supertype. Used by harnesses that need a closed type for a
/// closed term.
pub fn result_type_erased(r: &TypeResult) -> Type {
    let mut bound = BTreeSet::new();
    let mut cur = r;
    loop {
        match cur {
            TypeResult::Exists { var, body, .. } => {
                bound.insert(var.clone());
                cur = body;
            }
            TypeResult::Result { ty, .. } => return erase_mentions(ty, &bound),
        }
    }
}

fn erase_mentions(t: &Type, bound: &BTreeSet<Name>) -> Type {
    if bound.is_empty() {
        return t.clone();
    }
    let mentions = |t: &Type| {
        let mut fv = BTreeSet::new();
        t.free_vars(&mut fv);
        fv.iter().any(|v| bound.contains(v))
    };
    match t {
        Type::Refine { var, base, prop } => {
            let mut fv = BTreeSet::new();
            prop.free_vars(&mut fv);
            fv.remove(var);
            if fv.iter().any(|v| bound.contains(v)) {
                erase_mentions(base, bound)
            } else {
                Type::refine(var.clone(), erase_mentions(base, bound), prop.clone())
            }
        }
        Type::Pair(a, b) => Type::pair(erase_mentions(a, bound), erase_mentions(b, bound)),
        Type::Union(ms) => Type::union(ms.iter().map(|m| erase_mentions(m, bound)).collect()),
        Type::Fun { .. } => {
            if mentions(t) {
                Type::Top
            } else {
                t.clone()
            }
        }
        _ => t.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prover::{env_from_props, Config};
    use crate::prims::PrimOp;

    fn e(kind: ExprKind) -> Expr {
        Expr::synthetic(kind)
    }

    fn int(n: i64) -> Expr {
        e(ExprKind::Int(n.into()))
    }

    fn var(x: &str) -> Expr {
        e(ExprKind::Var(x.to_string()))
    }

    fn app(f: Expr, a: Expr) -> Expr {
        e(ExprKind::App(Box::new(f), Box::new(a)))
    }

    fn empty() -> HybridEnv {
        HybridEnv::default()
    }

    #[test]
    fn int_literal_carries_its_object() {
        let r = check(&empty(), &int(42)).unwrap();
        assert_eq!(
            r,
            TypeResult::result(Type::Int, Prop::TT, Prop::FF, Obj::int(42))
        );
    }

    #[test]
    fn int_predicate_judgment_is_exact() {
        let n = Obj::var("n");
        let env = env_from_props(
            Config::default(),
            &[Prop::is_type(n.clone(), Type::union(vec![Type::Int, Type::bool()]))],
        );
        let r = check(&env, &app(e(ExprKind::Prim(PrimOp::IsInt)), var("n"))).unwrap();
        assert_eq!(
            r,
            TypeResult::result(
                Type::bool(),
                Prop::is_type(n.clone(), Type::Int),
                Prop::not_type(n, Type::Int),
                Obj::Null,
            )
        );
    }

    #[test]
    fn identity_lambda_synthesizes_dependent_type() {
        let lam = e(ExprKind::Abs {
            param: "x".to_string(),
            param_ty: Type::Top,
            body: Box::new(var("x")),
        });
        let r = check(&empty(), &lam).unwrap();
        let expected_fun = Type::fun(
            "x",
            Type::Top,
            TypeResult::result(
                Type::Top,
                Prop::not_type(Obj::var("x"), Type::False),
                Prop::is_type(Obj::var("x"), Type::False),
                Obj::var("x"),
            ),
        );
        assert_eq!(
            r,
            TypeResult::result(expected_fun, Prop::TT, Prop::FF, Obj::Null)
        );
    }

    #[test]
    fn dead_branch_is_pruned_from_join() {
        // (if false 1 true): the then-branch is unreachable, so the result
        // takes the live branch's type.
        let prog = e(ExprKind::If(
            Box::new(e(ExprKind::False)),
            Box::new(int(1)),
            Box::new(e(ExprKind::True)),
        ));
        let r = check(&empty(), &prog).unwrap();
        match r {
            TypeResult::Result { ty, .. } => assert_eq!(ty, Type::True),
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn live_branches_join_to_union() {
        let env = env_from_props(
            Config::default(),
            &[Prop::is_type(Obj::var("b"), Type::bool())],
        );
        let prog = e(ExprKind::If(
            Box::new(var("b")),
            Box::new(int(1)),
            Box::new(e(ExprKind::True)),
        ));
        let r = check(&env, &prog).unwrap();
        match r {
            TypeResult::Result { ty, .. } => {
                assert_eq!(ty, Type::union(vec![Type::Int, Type::True]))
            }
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn unbound_variable_is_a_diagnostic() {
        assert!(check(&empty(), &var("nope")).is_err());
    }

    #[test]
    fn union_of_functions_applies() {
        // (if b (lambda (x : Int) 2) (lambda (y : Int) y)) applied to 5:
        // the operator synthesizes a union of two function types.
        let env = env_from_props(
            Config::default(),
            &[Prop::is_type(Obj::var("b"), Type::bool())],
        );
        let lam_const = e(ExprKind::Abs {
            param: "x".into(),
            param_ty: Type::Int,
            body: Box::new(int(2)),
        });
        let lam_id = e(ExprKind::Abs {
            param: "y".into(),
            param_ty: Type::Int,
            body: Box::new(var("y")),
        });
        let operator = e(ExprKind::If(
            Box::new(var("b")),
            Box::new(lam_const),
            Box::new(lam_id),
        ));
        let r = check(&env, &app(operator, int(5))).unwrap();
        match r {
            TypeResult::Result { ty, .. } => assert_eq!(ty, Type::Int),
            other => panic!("unexpected result {other:?}"),
        }
        // A union with a non-function member is still rejected.
        let not_fun = e(ExprKind::If(
            Box::new(var("b")),
            Box::new(e(ExprKind::Abs {
                param: "x".into(),
                param_ty: Type::Int,
                body: Box::new(int(2)),
            })),
            Box::new(int(0)),
        ));
        assert!(check(&env, &app(not_fun, int(5))).is_err());
    }

    #[test]
    fn literal_checks_against_refinement() {
        let pos = Type::refine("x", Type::Int, Prop::leq(Obj::int(1), Obj::var("x")));
        assert!(check_against(&empty(), &int(5), &pos).is_ok());
        assert!(check_against(&empty(), &int(0), &pos).is_err());
    }

    #[test]
    fn bool_does_not_check_against_int() {
        let d = check_against(&empty(), &e(ExprKind::True), &Type::Int).unwrap_err();
        assert_eq!(d.expected.as_deref(), Some("Int"));
    }

    #[test]
    fn checking_is_deterministic() {
        let env = env_from_props(
            Config::default(),
            &[Prop::is_type(Obj::var("n"), Type::union(vec![Type::Int, Type::bool()]))],
        );
        let prog = app(e(ExprKind::Prim(PrimOp::IsInt)), var("n"));
        let a = check(&env, &prog);
        let b = check(&env, &prog);
        assert_eq!(a, b);
    }
}
