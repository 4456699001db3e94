//! Deterministic generators and brute-force oracles shared by the
//! integration suites.

#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use rtr_core::ast::{Expr, ExprKind, Name, Obj, Prop, RuntimeEnv, Type, Value};
use rtr_core::lia::{Constraint, ConstraintSys, LinExpr, Rel};
use rtr_core::prims::PrimOp;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ----------------------------------------------------------------------
// linear systems and their integer-box oracle
// ----------------------------------------------------------------------

/// One raw constraint: `sum(coeffs * vars) + constant (<=|<) 0`.
#[derive(Debug, Clone)]
pub struct RawConstraint {
    pub coeffs: Vec<i64>,
    pub constant: i64,
    pub strict: bool,
}

#[derive(Debug, Clone)]
pub struct RawSystem {
    pub natoms: usize,
    pub constraints: Vec<RawConstraint>,
}

pub fn gen_system(rng: &mut ChaCha8Rng) -> RawSystem {
    let natoms = rng.gen_range(1..=4);
    let ncons = rng.gen_range(1..=6);
    let constraints = (0..ncons)
        .map(|_| RawConstraint {
            coeffs: (0..natoms).map(|_| rng.gen_range(-3..=3)).collect(),
            constant: rng.gen_range(-8..=8),
            strict: rng.gen_bool(0.3),
        })
        .collect();
    RawSystem { natoms, constraints }
}

pub fn to_constraint_sys(sys: &RawSystem) -> ConstraintSys {
    let mut out = ConstraintSys::default();
    for c in &sys.constraints {
        out.push(to_constraint(c));
    }
    out
}

pub fn to_constraint(c: &RawConstraint) -> Constraint {
    let mut e = LinExpr::constant(c.constant);
    for (i, coeff) in c.coeffs.iter().enumerate() {
        if *coeff != 0 {
            e.add_term(i, *coeff);
        }
    }
    Constraint::new(e, if c.strict { Rel::Lt } else { Rel::Le })
}

/// Integer negation of a raw constraint, independent of the solver's.
pub fn negate_raw(c: &RawConstraint) -> RawConstraint {
    // not(e <= 0) is e >= 1 i.e. -e + 1 <= 0; not(e < 0) is e >= 0.
    RawConstraint {
        coeffs: c.coeffs.iter().map(|k| -k).collect(),
        constant: if c.strict { -c.constant } else { -c.constant + 1 },
        strict: false,
    }
}

/// Exhaustive feasibility search over the integer box `[lo, hi]^natoms`
/// with interval pruning. Returns a witness if one exists.
pub fn box_solution(sys: &RawSystem, lo: i64, hi: i64) -> Option<Vec<i64>> {
    fn feasible_partial(
        sys: &RawSystem,
        assign: &[i64],
        lo: i64,
        hi: i64,
    ) -> bool {
        for c in &sys.constraints {
            let mut min = c.constant;
            for (i, coeff) in c.coeffs.iter().enumerate() {
                if i < assign.len() {
                    min += coeff * assign[i];
                } else {
                    min += std::cmp::min(coeff * lo, coeff * hi);
                }
            }
            let infeasible = if c.strict { min >= 0 } else { min > 0 };
            if infeasible {
                return false;
            }
        }
        true
    }
    fn rec(sys: &RawSystem, assign: &mut Vec<i64>, lo: i64, hi: i64) -> bool {
        if !feasible_partial(sys, assign, lo, hi) {
            return false;
        }
        if assign.len() == sys.natoms {
            return true;
        }
        for v in lo..=hi {
            assign.push(v);
            if rec(sys, assign, lo, hi) {
                return true;
            }
            assign.pop();
        }
        false
    }
    let mut assign = Vec::new();
    if rec(sys, &mut assign, lo, hi) {
        Some(assign)
    } else {
        None
    }
}

// ----------------------------------------------------------------------
// random types and widenings
// ----------------------------------------------------------------------

pub fn gen_type(rng: &mut ChaCha8Rng, depth: usize) -> Type {
    if depth == 0 {
        return gen_leaf_type(rng);
    }
    match rng.gen_range(0..10) {
        0..=3 => gen_leaf_type(rng),
        4 | 5 => Type::pair(gen_type(rng, depth - 1), gen_type(rng, depth - 1)),
        6 | 7 => {
            let n = rng.gen_range(2..=3);
            Type::union((0..n).map(|_| gen_type(rng, depth - 1)).collect())
        }
        8 => Type::fun(
            "a",
            gen_leaf_type(rng),
            rtr_core::TypeResult::plain(gen_type(rng, depth - 1)),
        ),
        _ => gen_refinement(rng),
    }
}

fn gen_leaf_type(rng: &mut ChaCha8Rng) -> Type {
    match rng.gen_range(0..9) {
        0 => Type::Top,
        1 => Type::Int,
        2 => Type::True,
        3 => Type::False,
        4 => Type::bool(),
        5 => Type::Vec,
        6 => Type::union(vec![Type::Int, Type::bool()]),
        7 => gen_refinement(rng),
        _ => Type::bottom(),
    }
}

fn gen_refinement(rng: &mut ChaCha8Rng) -> Type {
    let bound = rng.gen_range(-2..=2);
    if rng.gen_bool(0.5) {
        Type::refine(
            "v",
            Type::Int,
            Prop::leq(Obj::int(bound), Obj::var("v")),
        )
    } else {
        Type::refine(
            "v",
            Type::Int,
            Prop::leq(Obj::var("v"), Obj::int(bound)),
        )
    }
}

/// A type that is a supertype of `t` by construction.
pub fn widen(rng: &mut ChaCha8Rng, t: &Type) -> Type {
    match rng.gen_range(0..6) {
        0 => Type::Top,
        1 => Type::union(vec![t.clone(), gen_leaf_type(rng)]),
        2 => match t {
            Type::Refine { base, .. } => (**base).clone(),
            Type::Pair(a, b) => Type::pair(widen(rng, a), (**b).clone()),
            Type::Union(ms) if !ms.is_empty() => {
                let mut out = ms.clone();
                let i = rng.gen_range(0..out.len());
                out[i] = widen(rng, &out[i].clone());
                Type::union(out)
            }
            other => other.clone(),
        },
        3 => match t {
            Type::Pair(a, b) => Type::pair((**a).clone(), widen(rng, b)),
            other => Type::union(vec![other.clone(), Type::Vec]),
        },
        _ => t.clone(),
    }
}

// ----------------------------------------------------------------------
// value pools and model enumeration
// ----------------------------------------------------------------------

pub fn value_pool() -> Vec<Value> {
    let mut out: Vec<Value> = (-3..=3).map(Value::int).collect();
    out.push(Value::True);
    out.push(Value::False);
    out.push(Value::pair(Value::int(0), Value::int(0)));
    out.push(Value::pair(Value::int(0), Value::int(1)));
    out.push(Value::pair(Value::True, Value::int(1)));
    out.push(Value::pair(Value::False, Value::False));
    out.push(Value::Vector(vec![]));
    out.push(Value::Vector(vec![0.into(), 1.into()]));
    out
}

/// Visit every assignment of pool values to `vars`; stop early when the
/// visitor returns false.
pub fn for_each_model(
    vars: &[Name],
    pool: &[Value],
    visit: &mut impl FnMut(&RuntimeEnv) -> bool,
) -> bool {
    fn rec(
        vars: &[Name],
        pool: &[Value],
        rho: &mut RuntimeEnv,
        visit: &mut impl FnMut(&RuntimeEnv) -> bool,
    ) -> bool {
        let Some((first, rest)) = vars.split_first() else {
            return visit(rho);
        };
        for v in pool {
            rho.insert(first.clone(), v.clone());
            if !rec(rest, pool, rho, visit) {
                return false;
            }
        }
        rho.remove(first);
        true
    }
    let mut rho = RuntimeEnv::new();
    rec(vars, pool, &mut rho, visit)
}

// ----------------------------------------------------------------------
// random propositions over a small variable set
// ----------------------------------------------------------------------

pub struct PropGen {
    pub rng: ChaCha8Rng,
}

const PROP_VARS: [&str; 3] = ["x", "y", "z"];

impl PropGen {
    pub fn new(seed: u64) -> PropGen {
        PropGen { rng: rng(seed) }
    }

    fn var(&mut self) -> Name {
        PROP_VARS[self.rng.gen_range(0..PROP_VARS.len())].to_string()
    }

    pub fn obj(&mut self) -> Obj {
        match self.rng.gen_range(0..10) {
            0..=5 => Obj::var(self.var()),
            6 => Obj::int(self.rng.gen_range(-4..=4)),
            7 => Obj::field(rtr_core::Field::Fst, Obj::var(self.var())),
            8 => Obj::field(rtr_core::Field::Snd, Obj::var(self.var())),
            _ => Obj::field(rtr_core::Field::Len, Obj::var(self.var())),
        }
    }

    fn linear_obj(&mut self) -> Obj {
        let mut out = Obj::int(self.rng.gen_range(-4..=4));
        let n = self.rng.gen_range(0..=2);
        for _ in 0..n {
            let coeff = self.rng.gen_range(-2..=2i64);
            out = Obj::sum(out, Obj::scale(coeff, Obj::var(self.var())));
        }
        out
    }

    pub fn small_type(&mut self) -> Type {
        match self.rng.gen_range(0..11) {
            0 => Type::Top,
            1 => Type::Int,
            2 => Type::True,
            3 => Type::False,
            4 => Type::bool(),
            5 => Type::union(vec![Type::Int, Type::bool()]),
            6 => Type::union(vec![Type::Int, Type::True]),
            7 => Type::pair(Type::Int, Type::Int),
            8 => Type::pair(Type::Top, Type::Top),
            9 => Type::Vec,
            _ => {
                let b = self.rng.gen_range(-2..=2);
                if self.rng.gen_bool(0.5) {
                    Type::refine("v", Type::Int, Prop::leq(Obj::int(b), Obj::var("v")))
                } else {
                    Type::refine("v", Type::Int, Prop::leq(Obj::var("v"), Obj::int(b)))
                }
            }
        }
    }

    pub fn atom(&mut self) -> Prop {
        match self.rng.gen_range(0..20) {
            0..=7 => Prop::is_type(self.obj(), self.small_type()),
            8..=10 => Prop::not_type(self.obj(), self.small_type()),
            11..=14 => Prop::leq(self.linear_obj(), self.linear_obj()),
            15 | 16 => Prop::lt(self.linear_obj(), self.linear_obj()),
            17 | 18 => {
                let a = Obj::var(self.var());
                let b = if self.rng.gen_bool(0.5) {
                    Obj::var(self.var())
                } else {
                    Obj::int(self.rng.gen_range(-3..=3))
                };
                Prop::alias(a, b)
            }
            _ => Prop::TT,
        }
    }

    pub fn prop(&mut self, depth: usize) -> Prop {
        if depth == 0 || self.rng.gen_bool(0.55) {
            return self.atom();
        }
        let a = self.prop(depth - 1);
        let b = self.prop(depth - 1);
        if self.rng.gen_bool(0.5) {
            Prop::and(a, b)
        } else {
            Prop::or(a, b)
        }
    }

    pub fn env_props(&mut self) -> Vec<Prop> {
        let n = self.rng.gen_range(0..=4);
        (0..n).map(|_| self.prop(1)).collect()
    }

    /// A goal biased towards provable instances: often an environment
    /// element or a weakening of one, and sometimes a negation over a
    /// refinement type (the shape where the non-overlap model semantics
    /// bites).
    pub fn goal(&mut self, env: &[Prop]) -> Prop {
        if !env.is_empty() && self.rng.gen_bool(0.45) {
            let picked = env[self.rng.gen_range(0..env.len())].clone();
            if self.rng.gen_bool(0.3) {
                return Prop::or(picked, self.atom());
            }
            return picked;
        }
        if self.rng.gen_bool(0.15) {
            let b = self.rng.gen_range(-2..=2);
            let refined = Type::refine(
                "v",
                Type::Int,
                Prop::leq(Obj::var("v"), Obj::int(b)),
            );
            return Prop::not_type(Obj::var(self.var()), refined);
        }
        self.prop(2)
    }
}

pub fn prop_free_vars(props: &[Prop]) -> Vec<Name> {
    let mut set = std::collections::BTreeSet::new();
    for p in props {
        p.free_vars(&mut set);
    }
    set.into_iter().collect()
}

// ----------------------------------------------------------------------
// well-typed closed term generation
// ----------------------------------------------------------------------

pub struct TermGen {
    pub rng: ChaCha8Rng,
    counter: u64,
}

type Scope = Vec<(Name, Type)>;

impl TermGen {
    pub fn new(seed: u64) -> TermGen {
        TermGen {
            rng: rng(seed),
            counter: 0,
        }
    }

    fn fresh(&mut self) -> Name {
        let n = self.counter;
        self.counter += 1;
        format!("g{n}")
    }

    fn e(kind: ExprKind) -> Expr {
        Expr::synthetic(kind)
    }

    pub fn closed_term(&mut self, depth: usize) -> Expr {
        let target = self.pick_target();
        self.gen(&Vec::new(), &target, depth)
    }

    fn pick_target(&mut self) -> Type {
        match self.rng.gen_range(0..10) {
            0..=2 => Type::Int,
            3 | 4 => Type::bool(),
            5 => Type::Top,
            6 => Type::pair(Type::Int, Type::Int),
            7 => Type::Vec,
            8 => Type::union(vec![Type::Int, Type::bool()]),
            _ => Type::fun("p", Type::Int, rtr_core::TypeResult::plain(Type::Int)),
        }
    }

    fn scope_var(&mut self, scope: &Scope, target: &Type) -> Option<Expr> {
        let hits: Vec<&(Name, Type)> =
            scope.iter().filter(|(_, t)| t == target).collect();
        if hits.is_empty() {
            return None;
        }
        let (name, _) = hits[self.rng.gen_range(0..hits.len())];
        Some(Self::e(ExprKind::Var(name.clone())))
    }

    fn literal(&mut self, scope: &Scope, target: &Type) -> Expr {
        if self.rng.gen_bool(0.4) {
            if let Some(v) = self.scope_var(scope, target) {
                return v;
            }
        }
        match target {
            Type::Int => Self::e(ExprKind::Int(self.rng.gen_range(-8..=8i64).into())),
            Type::True => Self::e(ExprKind::True),
            Type::False => Self::e(ExprKind::False),
            Type::Top => match self.rng.gen_range(0..4) {
                0 => Self::e(ExprKind::Int(self.rng.gen_range(-8..=8i64).into())),
                1 => Self::e(ExprKind::True),
                2 => Self::e(ExprKind::Prim(PrimOp::Add1)),
                _ => Self::e(ExprKind::False),
            },
            Type::Pair(a, b) => Self::e(ExprKind::Cons(
                Box::new(self.literal(scope, a)),
                Box::new(self.literal(scope, b)),
            )),
            Type::Vec => {
                let n = self.rng.gen_range(0..=3);
                Self::e(ExprKind::VecLit(
                    (0..n)
                        .map(|_| Self::e(ExprKind::Int(self.rng.gen_range(-5..=5i64).into())))
                        .collect(),
                ))
            }
            Type::Union(ms) if !ms.is_empty() => {
                let m = ms[self.rng.gen_range(0..ms.len())].clone();
                self.literal(scope, &m)
            }
            Type::Fun { domain, range, .. } => {
                let param = self.fresh();
                let body_ty = match range.as_ref() {
                    rtr_core::TypeResult::Result { ty, .. } => ty.clone(),
                    _ => Type::Int,
                };
                let mut inner = scope.clone();
                inner.push((param.clone(), (**domain).clone()));
                let body = self.literal(&inner, &body_ty);
                Self::e(ExprKind::Abs {
                    param,
                    param_ty: (**domain).clone(),
                    body: Box::new(body),
                })
            }
            _ => Self::e(ExprKind::Int(0.into())),
        }
    }

    fn gen(&mut self, scope: &Scope, target: &Type, depth: usize) -> Expr {
        if depth == 0 {
            return self.literal(scope, target);
        }
        let roll = self.rng.gen_range(0..100);
        match roll {
            0..=17 => self.literal(scope, target),
            18..=32 => {
                // conditional on a boolean-ish test
                let test_ty = if self.rng.gen_bool(0.7) {
                    Type::bool()
                } else {
                    self.pick_target()
                };
                let test = self.gen(scope, &test_ty, depth - 1);
                let t = self.gen(scope, target, depth - 1);
                let e = self.gen(scope, target, depth - 1);
                Self::e(ExprKind::If(Box::new(test), Box::new(t), Box::new(e)))
            }
            33..=47 => {
                // let binding
                let bound_ty = self.pick_target();
                let bound = self.gen(scope, &bound_ty, depth - 1);
                let name = self.fresh();
                let mut inner = scope.clone();
                inner.push((name.clone(), bound_ty));
                let body = self.gen(&inner, target, depth - 1);
                Self::e(ExprKind::Let {
                    name,
                    bound: Box::new(bound),
                    body: Box::new(body),
                })
            }
            48..=57 => {
                // immediately applied abstraction
                let dom = self.pick_target();
                let param = self.fresh();
                let mut inner = scope.clone();
                inner.push((param.clone(), dom.clone()));
                let body = self.gen(&inner, target, depth - 1);
                let arg = self.gen(scope, &dom, depth - 1);
                Self::e(ExprKind::App(
                    Box::new(Self::e(ExprKind::Abs {
                        param,
                        param_ty: dom,
                        body: Box::new(body),
                    })),
                    Box::new(arg),
                ))
            }
            58..=72 => self.prim_app(scope, target, depth),
            73..=82 => {
                // pair projection hitting the target type
                let other = self.pick_target();
                let (pair, field_fst) = if self.rng.gen_bool(0.5) {
                    (
                        Self::e(ExprKind::Cons(
                            Box::new(self.gen(scope, target, depth - 1)),
                            Box::new(self.literal(scope, &other)),
                        )),
                        true,
                    )
                } else {
                    (
                        Self::e(ExprKind::Cons(
                            Box::new(self.literal(scope, &other)),
                            Box::new(self.gen(scope, target, depth - 1)),
                        )),
                        false,
                    )
                };
                if field_fst {
                    Self::e(ExprKind::Fst(Box::new(pair)))
                } else {
                    Self::e(ExprKind::Snd(Box::new(pair)))
                }
            }
            83..=90 => self.occurrence_pattern(scope, target, depth),
            _ => {
                // call a function-typed variable when one is around
                let fun_target =
                    Type::fun("p", Type::Int, rtr_core::TypeResult::plain(Type::Int));
                if *target == Type::Int {
                    if let Some(f) = self.scope_var(scope, &fun_target) {
                        let arg = self.gen(scope, &Type::Int, depth - 1);
                        return Self::e(ExprKind::App(Box::new(f), Box::new(arg)));
                    }
                }
                self.literal(scope, target)
            }
        }
    }

    fn prim_app(&mut self, scope: &Scope, target: &Type, depth: usize) -> Expr {
        let int_target = Type::Int;
        if *target == Type::bool() {
            return match self.rng.gen_range(0..5) {
                0 => Self::e(ExprKind::App(
                    Box::new(Self::e(ExprKind::Prim(PrimOp::Not))),
                    Box::new(self.gen(scope, &Type::Top, depth - 1)),
                )),
                1 => Self::e(ExprKind::App(
                    Box::new(Self::e(ExprKind::Prim(self.pick_predicate()))),
                    Box::new(self.gen(scope, &Type::Top, depth - 1)),
                )),
                2 | 3 => {
                    let cmp = if self.rng.gen_bool(0.5) {
                        PrimOp::Leq
                    } else {
                        PrimOp::Lt
                    };
                    Self::e(ExprKind::App(
                        Box::new(Self::e(ExprKind::Prim(cmp))),
                        Box::new(Self::e(ExprKind::Cons(
                            Box::new(self.gen(scope, &int_target, depth - 1)),
                            Box::new(self.gen(scope, &int_target, depth - 1)),
                        ))),
                    ))
                }
                _ => Self::e(ExprKind::App(
                    Box::new(Self::e(ExprKind::Prim(PrimOp::Eqi))),
                    Box::new(Self::e(ExprKind::Cons(
                        Box::new(self.gen(scope, &int_target, depth - 1)),
                        Box::new(self.gen(scope, &int_target, depth - 1)),
                    ))),
                )),
            };
        }
        match target {
            Type::Int => match self.rng.gen_range(0..4) {
                0 => Self::e(ExprKind::App(
                    Box::new(Self::e(ExprKind::Prim(PrimOp::Add1))),
                    Box::new(self.gen(scope, &int_target, depth - 1)),
                )),
                1 => Self::e(ExprKind::App(
                    Box::new(Self::e(ExprKind::Prim(PrimOp::Plus))),
                    Box::new(Self::e(ExprKind::Cons(
                        Box::new(self.gen(scope, &int_target, depth - 1)),
                        Box::new(self.gen(scope, &int_target, depth - 1)),
                    ))),
                )),
                2 => Self::e(ExprKind::App(
                    Box::new(Self::e(ExprKind::Prim(PrimOp::Len))),
                    Box::new(self.gen(scope, &Type::Vec, depth - 1)),
                )),
                _ => self.guarded_vec_ref(scope, depth),
            },
            _ => self.literal(scope, target),
        }
    }

    fn pick_predicate(&mut self) -> PrimOp {
        match self.rng.gen_range(0..3) {
            0 => PrimOp::IsInt,
            1 => PrimOp::IsBool,
            _ => PrimOp::IsPair,
        }
    }

    /// `(let (v …vec…) (let (i …int…) (if (leq (cons 0 i)) (if (lt (cons i (len v))) (vec-ref (cons v i)) 0) 0)))`
    fn guarded_vec_ref(&mut self, scope: &Scope, depth: usize) -> Expr {
        let v = self.fresh();
        let i = self.fresh();
        let vec_expr = self.gen(scope, &Type::Vec, depth.saturating_sub(1));
        let idx_expr = self.gen(scope, &Type::Int, depth.saturating_sub(1));
        let vv = || Self::e(ExprKind::Var(v.clone()));
        let iv = || Self::e(ExprKind::Var(i.clone()));
        let zero = || Self::e(ExprKind::Int(0.into()));
        let access = Self::e(ExprKind::App(
            Box::new(Self::e(ExprKind::Prim(PrimOp::VecRef))),
            Box::new(Self::e(ExprKind::Cons(Box::new(vv()), Box::new(iv())))),
        ));
        let upper = Self::e(ExprKind::If(
            Box::new(Self::e(ExprKind::App(
                Box::new(Self::e(ExprKind::Prim(PrimOp::Lt))),
                Box::new(Self::e(ExprKind::Cons(
                    Box::new(iv()),
                    Box::new(Self::e(ExprKind::App(
                        Box::new(Self::e(ExprKind::Prim(PrimOp::Len))),
                        Box::new(vv()),
                    ))),
                ))),
            ))),
            Box::new(access),
            Box::new(zero()),
        ));
        let guarded = Self::e(ExprKind::If(
            Box::new(Self::e(ExprKind::App(
                Box::new(Self::e(ExprKind::Prim(PrimOp::Leq))),
                Box::new(Self::e(ExprKind::Cons(Box::new(zero()), Box::new(iv())))),
            ))),
            Box::new(upper),
            Box::new(zero()),
        ));
        Self::e(ExprKind::Let {
            name: v,
            bound: Box::new(vec_expr),
            body: Box::new(Self::e(ExprKind::Let {
                name: i,
                bound: Box::new(idx_expr),
                body: Box::new(guarded),
            })),
        })
    }

    /// A branch on a type predicate over a union-typed binding, yielding an
    /// integer either way.
    fn occurrence_pattern(&mut self, scope: &Scope, target: &Type, depth: usize) -> Expr {
        if *target != Type::Int {
            return self.literal(scope, target);
        }
        let u = self.fresh();
        let union_ty = Type::union(vec![Type::Int, Type::bool()]);
        let bound = self.gen(scope, &union_ty, depth.saturating_sub(1));
        let fallback = self.literal(scope, &Type::Int);
        let body = Self::e(ExprKind::If(
            Box::new(Self::e(ExprKind::App(
                Box::new(Self::e(ExprKind::Prim(PrimOp::IsInt))),
                Box::new(Self::e(ExprKind::Var(u.clone()))),
            ))),
            Box::new(Self::e(ExprKind::Var(u.clone()))),
            Box::new(fallback),
        ));
        Self::e(ExprKind::Let {
            name: u,
            bound: Box::new(bound),
            body: Box::new(body),
        })
    }
}
