//! Subtyping for symbolic objects, types, and type-results.
//!
//! Rule order matters for the algorithmic reading: syntactic equality,
//! bottom on the left, top on the right, refinement weakening on the left,
//! union left, union right, refinement introduction on the right, then the
//! structural rules. Information-losing rules come last.

use crate::ast::{subst_result, Obj, Prop, Type, TypeResult};
use crate::prover::{Ctx, HybridEnv};

/// Object subsumption: the null object is the top object, alias-equivalent
/// objects are interchangeable, and pair objects are compared pointwise.
pub fn subobj(env: &HybridEnv, o1: &Obj, o2: &Obj) -> bool {
    if o2.is_null() {
        return true;
    }
    let a = env.canon(o1);
    let b = env.canon(o2);
    subobj_canon(&a, &b)
}

fn subobj_canon(a: &Obj, b: &Obj) -> bool {
    if a == b {
        return true;
    }
    match (a, b) {
        (_, Obj::Null) => true,
        (Obj::Pair(a1, a2), Obj::Pair(b1, b2)) => {
            subobj_canon(a1, b1) && subobj_canon(a2, b2)
        }
        _ => false,
    }
}

/// Decide `env |- t <: s`. Sound with respect to the declarative relation;
/// failures to find a derivation answer false.
pub fn subtype(env: &HybridEnv, t: &Type, s: &Type) -> bool {
    let mut ctx = env.fresh_ctx();
    subtype_with_ctx(env, t, s, &mut ctx)
}

pub(crate) fn subtype_with_ctx(env: &HybridEnv, t: &Type, s: &Type, ctx: &mut Ctx) -> bool {
    let Some(mut inner) = ctx.descend() else {
        return false;
    };
    let out = subtype_step(env, t, s, &mut inner);
    ctx.fresh = inner.fresh;
    out
}

fn subtype_step(env: &HybridEnv, t: &Type, s: &Type, ctx: &mut Ctx) -> bool {
    if t == s {
        return true;
    }
    if t.is_bottom() {
        return true;
    }
    if matches!(s, Type::Top) {
        return true;
    }
    // Refinement on the left: any refinement of t is below whatever t is
    // below.
    if let Type::Refine { base, .. } = t {
        if subtype_with_ctx(env, base, s, ctx) {
            return true;
        }
    }
    // Union on the left: every member must fit.
    if let Type::Union(ms) = t {
        if ms.iter().all(|m| subtype_with_ctx(env, m, s, ctx)) {
            return true;
        }
    }
    // Union on the right: some member fits.
    if let Type::Union(ms) = s {
        if ms.iter().any(|m| subtype_with_ctx(env, t, m, ctx)) {
            return true;
        }
    }
    // Refinement on the right: check the refinement body for a fresh
    // variable assumed at t.
    if let Type::Refine { .. } = s {
        let z = ctx.fresh_var();
        let zv = Obj::var(z);
        let mut extended = env.clone();
        extended.assume_inner(&Prop::is_type(zv.clone(), t.clone()), ctx);
        if extended.proves_inner(&Prop::is_type(zv, s.clone()), ctx) {
            return true;
        }
    }
    match (t, s) {
        (Type::Pair(a1, a2), Type::Pair(b1, b2)) => {
            subtype_with_ctx(env, a1, b1, ctx) && subtype_with_ctx(env, a2, b2, ctx)
        }
        (
            Type::Fun {
                param: px,
                domain: dx,
                range: rx,
            },
            Type::Fun {
                param: py,
                domain: dy,
                range: ry,
            },
        ) => {
            if !subtype_with_ctx(env, dy, dx, ctx) {
                return false;
            }
            // Compare ranges under a common fresh name bound at the more
            // specific domain.
            let w = ctx.fresh_var();
            let wv = Obj::var(w);
            let range_t = subst_result(rx, px, &wv);
            let range_s = subst_result(ry, py, &wv);
            let mut extended = env.clone();
            extended.assume_inner(&Prop::is_type(wv, (**dy).clone()), ctx);
            subresult_with_ctx(&extended, &range_t, &range_s, ctx)
        }
        _ => false,
    }
}

/// Decide `env |- r1 <: r2` for type-results. Existentials on the left are
/// instantiated into the environment; existentials on the right are the
/// checker's responsibility and answer false here.
pub fn subresult(env: &HybridEnv, r1: &TypeResult, r2: &TypeResult) -> bool {
    let mut ctx = env.fresh_ctx();
    subresult_with_ctx(env, r1, r2, &mut ctx)
}

pub(crate) fn subresult_with_ctx(
    env: &HybridEnv,
    r1: &TypeResult,
    r2: &TypeResult,
    ctx: &mut Ctx,
) -> bool {
    let Some(mut inner) = ctx.descend() else {
        return false;
    };
    let out = subresult_step(env, r1, r2, &mut inner);
    ctx.fresh = inner.fresh;
    out
}

fn subresult_step(env: &HybridEnv, r1: &TypeResult, r2: &TypeResult, ctx: &mut Ctx) -> bool {
    match r1 {
        TypeResult::Exists { var, ty, body } => {
            let z = ctx.fresh_var();
            let zv = Obj::var(z);
            let body = subst_result(body, var, &zv);
            let mut extended = env.clone();
            extended.assume_inner(&Prop::is_type(zv, ty.clone()), ctx);
            subresult_with_ctx(&extended, &body, r2, ctx)
        }
        TypeResult::Result {
            ty: t1,
            then_prop: tp1,
            else_prop: ep1,
            obj: o1,
        } => match r2 {
            TypeResult::Exists { .. } => false,
            TypeResult::Result {
                ty: t2,
                then_prop: tp2,
                else_prop: ep2,
                obj: o2,
            } => {
                if !subtype_with_ctx(env, t1, t2, ctx) {
                    return false;
                }
                let mut then_env = env.clone();
                then_env.assume_inner(tp1, ctx);
                if !then_env.proves_inner(tp2, ctx) {
                    return false;
                }
                let mut else_env = env.clone();
                else_env.assume_inner(ep1, ctx);
                if !else_env.proves_inner(ep2, ctx) {
                    return false;
                }
                subobj(env, o1, o2)
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Prop;
    use crate::prover::{env_from_props, Config};

    fn empty() -> HybridEnv {
        HybridEnv::default()
    }

    fn x() -> Obj {
        Obj::var("x")
    }

    #[test]
    fn null_is_top_object() {
        assert!(subobj(&empty(), &x(), &Obj::Null));
    }

    #[test]
    fn alias_equivalent_objects_are_subobjects() {
        let env = env_from_props(
            Config::default(),
            &[Prop::alias(x(), Obj::var("y"))],
        );
        assert!(subobj(&env, &x(), &Obj::var("y")));
        assert!(subobj(&env, &Obj::var("y"), &x()));
    }

    #[test]
    fn distinct_variables_are_not_subobjects() {
        assert!(!subobj(&empty(), &x(), &Obj::var("y")));
    }

    #[test]
    fn refinement_weakens_to_base() {
        let nonneg = Type::refine("x", Type::Int, Prop::leq(Obj::int(0), x()));
        assert!(subtype(&empty(), &nonneg, &Type::Int));
        assert!(!subtype(&empty(), &Type::Int, &nonneg));
    }

    #[test]
    fn bool_is_the_union_of_its_tags() {
        let u = Type::union(vec![Type::True, Type::False]);
        assert!(subtype(&empty(), &u, &Type::bool()));
        assert!(subtype(&empty(), &Type::bool(), &u));
    }

    #[test]
    fn refinement_entailment_through_theory() {
        let pos = Type::refine("x", Type::Int, Prop::leq(Obj::int(1), x()));
        let nonneg = Type::refine("y", Type::Int, Prop::leq(Obj::int(0), Obj::var("y")));
        assert!(subtype(&empty(), &pos, &nonneg));
        assert!(!subtype(&empty(), &nonneg, &pos));
    }

    #[test]
    fn bottom_below_everything_top_above() {
        let samples = [
            Type::Int,
            Type::bool(),
            Type::pair(Type::Int, Type::Top),
            Type::Vec,
        ];
        for t in &samples {
            assert!(subtype(&empty(), &Type::bottom(), t));
            assert!(subtype(&empty(), t, &Type::Top));
        }
    }

    #[test]
    fn function_subtyping_is_contra_co() {
        // (x : Top -> Int) <: (x : Int -> Top)
        let f = Type::fun("x", Type::Top, TypeResult::plain(Type::Int));
        let g = Type::fun("x", Type::Int, TypeResult::plain(Type::Top));
        assert!(subtype(&empty(), &f, &g));
        assert!(!subtype(&empty(), &g, &f));
    }

    #[test]
    fn subresult_weakening() {
        let r1 = TypeResult::result(Type::Int, Prop::TT, Prop::FF, Obj::Null);
        let r2 = TypeResult::result(Type::Top, Prop::TT, Prop::TT, Obj::Null);
        assert!(subresult(&empty(), &r1, &r2));
        assert!(!subresult(&empty(), &r2, &r1));
    }

    #[test]
    fn subresult_instantiates_left_existential() {
        let nonneg = Type::refine("v", Type::Int, Prop::leq(Obj::int(0), Obj::var("v")));
        let body = TypeResult::result(
            Type::Int,
            Prop::leq(Obj::int(0), x()),
            Prop::TT,
            Obj::Null,
        );
        let r1 = TypeResult::exists("x", nonneg, body);
        let r2 = TypeResult::plain(Type::Int);
        assert!(subresult(&empty(), &r1, &r2));
    }

    #[test]
    fn subresult_objects_need_alias_evidence() {
        let r1 = TypeResult::result(Type::Int, Prop::TT, Prop::FF, x());
        let r2 = TypeResult::result(Type::Int, Prop::TT, Prop::FF, Obj::var("y"));
        assert!(!subresult(&empty(), &r1, &r2));
        let aliased = env_from_props(Config::default(), &[Prop::alias(x(), Obj::var("y"))]);
        assert!(subresult(&aliased, &r1, &r2));
    }
}
