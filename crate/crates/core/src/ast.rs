//! Abstract syntax: expressions, values, types, propositions, symbolic
//! objects, and type-results, together with the normalization and
//! substitution machinery shared by the prover, checker, and evaluator.
//!
//! Symbolic objects are kept in a canonical normal form at all times:
//! field projections of pair objects reduce away, and integer-valued
//! combinations are folded into a single linear form with sorted bases.
//! Propositions whose atoms mention the null object are rewritten to `tt`
//! at construction and never stored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::prims::PrimOp;

pub type Name = String;

/// Byte range into the original source text. Synthesized terms carry the
/// dummy span.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

impl Span {
    pub fn new(lo: usize, hi: usize) -> Span {
        Span { lo, hi }
    }

    pub fn dummy() -> Span {
        Span { lo: 0, hi: 0 }
    }
}

/// Field selectors usable in symbolic object paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Field {
    Fst,
    Snd,
    Len,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Fst => write!(f, "fst"),
            Field::Snd => write!(f, "snd"),
            Field::Len => write!(f, "len"),
        }
    }
}

/// A canonical integer-linear combination: sum of coefficient * base plus a
/// constant. Bases are non-linear, non-null objects; zero coefficients are
/// never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinComb {
    pub terms: BTreeMap<Obj, BigInt>,
    pub constant: BigInt,
}

impl LinComb {
    pub fn constant(n: BigInt) -> LinComb {
        LinComb {
            terms: BTreeMap::new(),
            constant: n,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Symbolic objects: the canonical subset of program terms that may be
/// lifted to the type level.
///
/// `Null` is the "no object" marker and never appears strictly inside
/// another object; composites that would contain it collapse to `Null`.
/// Integer literals, scalings, and sums are all represented by the single
/// canonical [`LinComb`] form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Obj {
    Null,
    Var(Name),
    Field(Field, Box<Obj>),
    Pair(Box<Obj>, Box<Obj>),
    Linear(LinComb),
}

impl Obj {
    pub fn var(name: impl Into<Name>) -> Obj {
        Obj::Var(name.into())
    }

    pub fn int(n: impl Into<BigInt>) -> Obj {
        Obj::Linear(LinComb::constant(n.into()))
    }

    /// Field projection, reducing projections of pair objects on the spot.
    pub fn field(f: Field, o: Obj) -> Obj {
        match (f, o) {
            (_, Obj::Null) => Obj::Null,
            (Field::Fst, Obj::Pair(a, _)) => *a,
            (Field::Snd, Obj::Pair(_, b)) => *b,
            (f, o) => Obj::Field(f, Box::new(o)),
        }
    }

    pub fn pair(a: Obj, b: Obj) -> Obj {
        if a == Obj::Null || b == Obj::Null {
            Obj::Null
        } else {
            Obj::Pair(Box::new(a), Box::new(b))
        }
    }

    /// `n * o`, folded into canonical linear form.
    pub fn scale(n: impl Into<BigInt>, o: Obj) -> Obj {
        let n = n.into();
        if o == Obj::Null {
            return Obj::Null;
        }
        if n.is_zero() {
            return Obj::int(0);
        }
        let mut lin = Obj::to_linear(o);
        for coeff in lin.terms.values_mut() {
            *coeff *= &n;
        }
        lin.constant *= &n;
        Obj::from_linear(lin)
    }

    /// `a + b`, folded into canonical linear form.
    pub fn sum(a: Obj, b: Obj) -> Obj {
        if a == Obj::Null || b == Obj::Null {
            return Obj::Null;
        }
        let la = Obj::to_linear(a);
        let lb = Obj::to_linear(b);
        let mut terms = la.terms;
        for (base, coeff) in lb.terms {
            let entry = terms.entry(base).or_insert_with(BigInt::zero);
            *entry += coeff;
        }
        terms.retain(|_, c| !c.is_zero());
        Obj::from_linear(LinComb {
            terms,
            constant: la.constant + lb.constant,
        })
    }

    fn to_linear(o: Obj) -> LinComb {
        match o {
            Obj::Linear(l) => l,
            base => {
                let mut terms = BTreeMap::new();
                terms.insert(base, BigInt::one());
                LinComb {
                    terms,
                    constant: BigInt::zero(),
                }
            }
        }
    }

    fn from_linear(lin: LinComb) -> Obj {
        if lin.terms.len() == 1 && lin.constant.is_zero() {
            let (base, coeff) = lin.terms.iter().next().unwrap();
            if coeff.is_one() {
                return base.clone();
            }
        }
        Obj::Linear(lin)
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Obj::Linear(l) if l.is_constant() => Some(&l.constant),
            _ => None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Obj::Null)
    }

    pub fn free_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Obj::Null => {}
            Obj::Var(x) => {
                out.insert(x.clone());
            }
            Obj::Field(_, o) => o.free_vars(out),
            Obj::Pair(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            Obj::Linear(l) => {
                for base in l.terms.keys() {
                    base.free_vars(out);
                }
            }
        }
    }
}

/// Re-establish the canonical normal form of an object bottom-up.
/// Idempotent; objects built through the smart constructors are already
/// normal.
pub fn normalize_obj(o: &Obj) -> Obj {
    match o {
        Obj::Null => Obj::Null,
        Obj::Var(x) => Obj::Var(x.clone()),
        Obj::Field(f, inner) => Obj::field(*f, normalize_obj(inner)),
        Obj::Pair(a, b) => Obj::pair(normalize_obj(a), normalize_obj(b)),
        Obj::Linear(l) => {
            let mut acc = Obj::int(l.constant.clone());
            for (base, coeff) in &l.terms {
                acc = Obj::sum(acc, Obj::scale(coeff.clone(), normalize_obj(base)));
            }
            acc
        }
    }
}

/// Types. `Bool` is the union of `True` and `False`; the bottom type is the
/// empty union. Union members are kept sorted and deduplicated so equality
/// is order-insensitive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Type {
    Top,
    Int,
    True,
    False,
    Pair(Box<Type>, Box<Type>),
    Union(Vec<Type>),
    Fun {
        param: Name,
        domain: Box<Type>,
        range: Box<TypeResult>,
    },
    Refine {
        var: Name,
        base: Box<Type>,
        prop: Prop,
    },
    Vec,
}

impl Type {
    /// Union constructor: sorts, deduplicates, drops empty-union members,
    /// and collapses singleton unions.
    pub fn union(members: Vec<Type>) -> Type {
        let mut ms: Vec<Type> = members
            .into_iter()
            .filter(|t| !t.is_bottom())
            .collect();
        ms.sort();
        ms.dedup();
        if ms.len() == 1 {
            ms.pop().unwrap()
        } else {
            Type::Union(ms)
        }
    }

    pub fn bool() -> Type {
        Type::Union(vec![Type::True, Type::False])
    }

    pub fn bottom() -> Type {
        Type::Union(Vec::new())
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Type::Union(ms) if ms.is_empty())
    }

    pub fn pair(a: Type, b: Type) -> Type {
        Type::Pair(Box::new(a), Box::new(b))
    }

    pub fn fun(param: impl Into<Name>, domain: Type, range: TypeResult) -> Type {
        Type::Fun {
            param: param.into(),
            domain: Box::new(domain),
            range: Box::new(range),
        }
    }

    pub fn refine(var: impl Into<Name>, base: Type, prop: Prop) -> Type {
        Type::Refine {
            var: var.into(),
            base: Box::new(base),
            prop,
        }
    }

    pub fn free_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Type::Top | Type::Int | Type::True | Type::False | Type::Vec => {}
            Type::Pair(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            Type::Union(ms) => {
                for m in ms {
                    m.free_vars(out);
                }
            }
            Type::Fun {
                param,
                domain,
                range,
            } => {
                domain.free_vars(out);
                let mut inner = BTreeSet::new();
                range.free_vars(&mut inner);
                inner.remove(param);
                out.extend(inner);
            }
            Type::Refine { var, base, prop } => {
                base.free_vars(out);
                let mut inner = BTreeSet::new();
                prop.free_vars(&mut inner);
                inner.remove(var);
                out.extend(inner);
            }
        }
    }
}

/// Propositions. Atoms whose object is the null object are meaningless and
/// collapse to `TT` at construction; the smart constructors below are the
/// only way other modules build compound propositions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Prop {
    TT,
    FF,
    IsType(Obj, Box<Type>),
    NotType(Obj, Box<Type>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Alias(Obj, Obj),
    Leq(Obj, Obj),
    Lt(Obj, Obj),
}

impl Prop {
    pub fn is_type(o: Obj, t: Type) -> Prop {
        if o.is_null() {
            Prop::TT
        } else {
            Prop::IsType(o, Box::new(t))
        }
    }

    pub fn not_type(o: Obj, t: Type) -> Prop {
        if o.is_null() {
            Prop::TT
        } else {
            Prop::NotType(o, Box::new(t))
        }
    }

    pub fn alias(a: Obj, b: Obj) -> Prop {
        if a.is_null() || b.is_null() {
            Prop::TT
        } else {
            Prop::Alias(a, b)
        }
    }

    pub fn leq(a: Obj, b: Obj) -> Prop {
        if a.is_null() || b.is_null() {
            Prop::TT
        } else {
            Prop::Leq(a, b)
        }
    }

    pub fn lt(a: Obj, b: Obj) -> Prop {
        if a.is_null() || b.is_null() {
            Prop::TT
        } else {
            Prop::Lt(a, b)
        }
    }

    pub fn and(a: Prop, b: Prop) -> Prop {
        match (a, b) {
            (Prop::TT, p) | (p, Prop::TT) => p,
            (Prop::FF, _) | (_, Prop::FF) => Prop::FF,
            (a, b) => Prop::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: Prop, b: Prop) -> Prop {
        match (a, b) {
            (Prop::TT, _) | (_, Prop::TT) => Prop::TT,
            (Prop::FF, p) | (p, Prop::FF) => p,
            (a, b) => Prop::Or(Box::new(a), Box::new(b)),
        }
    }

    pub fn free_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Prop::TT | Prop::FF => {}
            Prop::IsType(o, t) | Prop::NotType(o, t) => {
                o.free_vars(out);
                t.free_vars(out);
            }
            Prop::And(a, b) | Prop::Or(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            Prop::Alias(a, b) | Prop::Leq(a, b) | Prop::Lt(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
        }
    }

    /// True if any atom's object is or contains the null object. Smart
    /// constructors guarantee constructed props never satisfy this.
    pub fn mentions_null(&self) -> bool {
        fn obj_has_null(o: &Obj) -> bool {
            match o {
                Obj::Null => true,
                Obj::Var(_) => false,
                Obj::Field(_, i) => obj_has_null(i),
                Obj::Pair(a, b) => obj_has_null(a) || obj_has_null(b),
                Obj::Linear(l) => l.terms.keys().any(obj_has_null),
            }
        }
        match self {
            Prop::TT | Prop::FF => false,
            Prop::IsType(o, _) | Prop::NotType(o, _) => obj_has_null(o),
            Prop::And(a, b) | Prop::Or(a, b) => a.mentions_null() || b.mentions_null(),
            Prop::Alias(a, b) | Prop::Leq(a, b) | Prop::Lt(a, b) => {
                obj_has_null(a) || obj_has_null(b)
            }
        }
    }
}

/// The full output of typing an expression: a type, a proposition for each
/// truthiness outcome, and a symbolic object — or an existentially
/// quantified result for values with no in-scope object.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum TypeResult {
    Result {
        ty: Type,
        then_prop: Prop,
        else_prop: Prop,
        obj: Obj,
    },
    Exists {
        var: Name,
        ty: Type,
        body: Box<TypeResult>,
    },
}

impl TypeResult {
    pub fn result(ty: Type, then_prop: Prop, else_prop: Prop, obj: Obj) -> TypeResult {
        TypeResult::Result {
            ty,
            then_prop,
            else_prop,
            obj,
        }
    }

    /// Result with trivial propositions and no object.
    pub fn plain(ty: Type) -> TypeResult {
        TypeResult::result(ty, Prop::TT, Prop::TT, Obj::Null)
    }

    pub fn exists(var: impl Into<Name>, ty: Type, body: TypeResult) -> TypeResult {
        TypeResult::Exists {
            var: var.into(),
            ty,
            body: Box::new(body),
        }
    }

    pub fn exists_depth(&self) -> usize {
        match self {
            TypeResult::Result { .. } => 0,
            TypeResult::Exists { body, .. } => 1 + body.exists_depth(),
        }
    }

    pub fn free_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            TypeResult::Result {
                ty,
                then_prop,
                else_prop,
                obj,
            } => {
                ty.free_vars(out);
                then_prop.free_vars(out);
                else_prop.free_vars(out);
                obj.free_vars(out);
            }
            TypeResult::Exists { var, ty, body } => {
                ty.free_vars(out);
                let mut inner = BTreeSet::new();
                body.free_vars(&mut inner);
                inner.remove(var);
                out.extend(inner);
            }
        }
    }
}

/// The declarative environment: an ordered list of propositions.
pub type Env = Vec<Prop>;

/// Expressions, each carrying a source span.
#[derive(Debug, Clone, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

/// Equality on expressions ignores spans.
impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        self.kind == other.kind
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Var(Name),
    Int(BigInt),
    True,
    False,
    Prim(PrimOp),
    Abs {
        param: Name,
        param_ty: Type,
        body: Box<Expr>,
    },
    App(Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Let {
        name: Name,
        bound: Box<Expr>,
        body: Box<Expr>,
    },
    Cons(Box<Expr>, Box<Expr>),
    Fst(Box<Expr>),
    Snd(Box<Expr>),
    VecLit(Vec<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Expr {
        Expr { kind, span }
    }

    pub fn synthetic(kind: ExprKind) -> Expr {
        Expr::new(kind, Span::dummy())
    }

    /// Free program variables, including object variables free in embedded
    /// type annotations.
    pub fn free_vars(&self, out: &mut BTreeSet<Name>) {
        match &self.kind {
            ExprKind::Var(x) => {
                out.insert(x.clone());
            }
            ExprKind::Int(_) | ExprKind::True | ExprKind::False | ExprKind::Prim(_) => {}
            ExprKind::Abs {
                param,
                param_ty,
                body,
            } => {
                param_ty.free_vars(out);
                let mut inner = BTreeSet::new();
                body.free_vars(&mut inner);
                inner.remove(param);
                out.extend(inner);
            }
            ExprKind::App(f, a) => {
                f.free_vars(out);
                a.free_vars(out);
            }
            ExprKind::If(c, t, e) => {
                c.free_vars(out);
                t.free_vars(out);
                e.free_vars(out);
            }
            ExprKind::Let { name, bound, body } => {
                bound.free_vars(out);
                let mut inner = BTreeSet::new();
                body.free_vars(&mut inner);
                inner.remove(name);
                out.extend(inner);
            }
            ExprKind::Cons(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            ExprKind::Fst(e) | ExprKind::Snd(e) => e.free_vars(out),
            ExprKind::VecLit(es) => {
                for e in es {
                    e.free_vars(out);
                }
            }
        }
    }
}

/// Closed run-time values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(BigInt),
    True,
    False,
    Prim(PrimOp),
    Pair(Box<Value>, Box<Value>),
    Closure {
        env: RuntimeEnv,
        param: Name,
        param_ty: Type,
        body: Expr,
    },
    Vector(Vec<BigInt>),
}

impl Value {
    pub fn int(n: impl Into<BigInt>) -> Value {
        Value::Int(n.into())
    }

    pub fn bool(b: bool) -> Value {
        if b {
            Value::True
        } else {
            Value::False
        }
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Value::False)
    }
}

/// Runtime environments: finite maps from variable names to closed values.
pub type RuntimeEnv = BTreeMap<Name, Value>;

/// Produce a name based on `hint` that avoids every name in `taken`.
/// Generated names use `%`, which the surface syntax reserves.
pub fn fresh_name(hint: &str, taken: &BTreeSet<Name>) -> Name {
    let base = hint.split('%').next().unwrap_or(hint);
    let base = if base.is_empty() { "x" } else { base };
    if !taken.contains(base) && base == hint {
        return hint.to_string();
    }
    let mut k = 0usize;
    loop {
        let candidate = format!("{base}%{k}");
        if !taken.contains(&candidate) {
            return candidate;
        }
        k += 1;
    }
}

/// Capture-avoiding substitution of object `o` for variable `x`.
///
/// All three type-level categories re-normalize as they rebuild, so atoms
/// that come to mention the null object vanish into `TT`.
pub fn subst_obj(target: &Obj, x: &str, o: &Obj) -> Obj {
    match target {
        Obj::Null => Obj::Null,
        Obj::Var(y) => {
            if y == x {
                o.clone()
            } else {
                target.clone()
            }
        }
        Obj::Field(f, inner) => Obj::field(*f, subst_obj(inner, x, o)),
        Obj::Pair(a, b) => Obj::pair(subst_obj(a, x, o), subst_obj(b, x, o)),
        Obj::Linear(l) => {
            let mut acc = Obj::int(l.constant.clone());
            for (base, coeff) in &l.terms {
                acc = Obj::sum(acc, Obj::scale(coeff.clone(), subst_obj(base, x, o)));
            }
            acc
        }
    }
}

pub fn subst_prop(target: &Prop, x: &str, o: &Obj) -> Prop {
    match target {
        Prop::TT => Prop::TT,
        Prop::FF => Prop::FF,
        Prop::IsType(obj, t) => Prop::is_type(subst_obj(obj, x, o), subst_type(t, x, o)),
        Prop::NotType(obj, t) => Prop::not_type(subst_obj(obj, x, o), subst_type(t, x, o)),
        Prop::And(a, b) => Prop::and(subst_prop(a, x, o), subst_prop(b, x, o)),
        Prop::Or(a, b) => Prop::or(subst_prop(a, x, o), subst_prop(b, x, o)),
        Prop::Alias(a, b) => Prop::alias(subst_obj(a, x, o), subst_obj(b, x, o)),
        Prop::Leq(a, b) => Prop::leq(subst_obj(a, x, o), subst_obj(b, x, o)),
        Prop::Lt(a, b) => Prop::lt(subst_obj(a, x, o), subst_obj(b, x, o)),
    }
}

pub fn subst_type(target: &Type, x: &str, o: &Obj) -> Type {
    match target {
        Type::Top | Type::Int | Type::True | Type::False | Type::Vec => target.clone(),
        Type::Pair(a, b) => Type::pair(subst_type(a, x, o), subst_type(b, x, o)),
        Type::Union(ms) => Type::union(ms.iter().map(|m| subst_type(m, x, o)).collect()),
        Type::Fun {
            param,
            domain,
            range,
        } => {
            let domain = subst_type(domain, x, o);
            if param == x {
                return Type::Fun {
                    param: param.clone(),
                    domain: Box::new(domain),
                    range: range.clone(),
                };
            }
            let (param, range) = avoid_capture_result(param, range, x, o);
            Type::Fun {
                param,
                domain: Box::new(domain),
                range: Box::new(subst_result(&range, x, o)),
            }
        }
        Type::Refine { var, base, prop } => {
            let base = subst_type(base, x, o);
            if var == x {
                return Type::Refine {
                    var: var.clone(),
                    base: Box::new(base),
                    prop: prop.clone(),
                };
            }
            let (var, prop) = avoid_capture_prop(var, prop, x, o);
            Type::Refine {
                var,
                base: Box::new(base),
                prop: subst_prop(&prop, x, o),
            }
        }
    }
}

pub fn subst_result(target: &TypeResult, x: &str, o: &Obj) -> TypeResult {
    match target {
        TypeResult::Result {
            ty,
            then_prop,
            else_prop,
            obj,
        } => TypeResult::result(
            subst_type(ty, x, o),
            subst_prop(then_prop, x, o),
            subst_prop(else_prop, x, o),
            subst_obj(obj, x, o),
        ),
        TypeResult::Exists { var, ty, body } => {
            let ty = subst_type(ty, x, o);
            if var == x {
                return TypeResult::Exists {
                    var: var.clone(),
                    ty,
                    body: body.clone(),
                };
            }
            let (var, body) = avoid_capture_result(var, body, x, o);
            TypeResult::exists(var, ty, subst_result(&body, x, o))
        }
    }
}

fn obj_free_vars(o: &Obj) -> BTreeSet<Name> {
    let mut s = BTreeSet::new();
    o.free_vars(&mut s);
    s
}

fn avoid_capture_result(
    binder: &str,
    body: &TypeResult,
    x: &str,
    o: &Obj,
) -> (Name, TypeResult) {
    let ofv = obj_free_vars(o);
    if !ofv.contains(binder) {
        return (binder.to_string(), body.clone());
    }
    let mut taken = ofv;
    body.free_vars(&mut taken);
    taken.insert(x.to_string());
    let fresh = fresh_name(binder, &taken);
    let renamed = subst_result(body, binder, &Obj::var(fresh.clone()));
    (fresh, renamed)
}

fn avoid_capture_prop(binder: &str, body: &Prop, x: &str, o: &Obj) -> (Name, Prop) {
    let ofv = obj_free_vars(o);
    if !ofv.contains(binder) {
        return (binder.to_string(), body.clone());
    }
    let mut taken = ofv;
    body.free_vars(&mut taken);
    taken.insert(x.to_string());
    let fresh = fresh_name(binder, &taken);
    let renamed = subst_prop(body, binder, &Obj::var(fresh.clone()));
    (fresh, renamed)
}

/// Lifting substitution: substitute the operand object when there is one,
/// otherwise bind the variable existentially at the operand's type.
pub fn lift_subst(r: &TypeResult, x: &str, o: &Obj, ty: &Type) -> TypeResult {
    if o.is_null() {
        TypeResult::exists(x, ty.clone(), r.clone())
    } else {
        subst_result(r, x, o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x() -> Obj {
        Obj::var("x")
    }
    fn y() -> Obj {
        Obj::var("y")
    }

    #[test]
    fn fst_of_pair_object_reduces() {
        let o = Obj::Field(
            Field::Fst,
            Box::new(Obj::Pair(Box::new(x()), Box::new(y()))),
        );
        assert_eq!(normalize_obj(&o), x());
    }

    #[test]
    fn normalize_is_identity_on_vars() {
        assert_eq!(normalize_obj(&x()), x());
    }

    #[test]
    fn linear_form_folds_constants() {
        let o = Obj::sum(Obj::int(2), Obj::scale(3, x()));
        let again = normalize_obj(&o);
        assert_eq!(o, again);
        // 2 + 3x + (-3)x + 1 = 3
        let cancelled = Obj::sum(Obj::sum(o, Obj::scale(-3, x())), Obj::int(1));
        assert_eq!(cancelled, Obj::int(3));
    }

    #[test]
    fn null_collapses_composites() {
        assert_eq!(Obj::field(Field::Fst, Obj::Null), Obj::Null);
        assert_eq!(Obj::pair(x(), Obj::Null), Obj::Null);
        assert_eq!(Obj::sum(x(), Obj::Null), Obj::Null);
        assert_eq!(Obj::scale(2, Obj::Null), Obj::Null);
    }

    #[test]
    fn subst_renames_variables() {
        let p = Prop::is_type(x(), Type::Int);
        assert_eq!(subst_prop(&p, "x", &y()), Prop::is_type(y(), Type::Int));
    }

    #[test]
    fn subst_then_normalizes_field_paths() {
        let p = Prop::is_type(Obj::field(Field::Fst, x()), Type::Int);
        let o = Obj::pair(Obj::var("a"), Obj::var("b"));
        assert_eq!(
            subst_prop(&p, "x", &o),
            Prop::is_type(Obj::var("a"), Type::Int)
        );
    }

    #[test]
    fn subst_null_discards_atom() {
        let p = Prop::is_type(x(), Type::Int);
        assert_eq!(subst_prop(&p, "x", &Obj::Null), Prop::TT);
    }

    #[test]
    fn lift_subst_null_wraps_existential() {
        let r = TypeResult::result(Type::Int, Prop::TT, Prop::FF, x());
        let lifted = lift_subst(&r, "x", &Obj::Null, &Type::Int);
        assert_eq!(lifted, TypeResult::exists("x", Type::Int, r.clone()));
        assert_eq!(lifted.exists_depth(), r.exists_depth() + 1);
    }

    #[test]
    fn lift_subst_object_substitutes() {
        let r = TypeResult::result(Type::Int, Prop::TT, Prop::FF, x());
        assert_eq!(
            lift_subst(&r, "x", &Obj::int(5), &Type::Int),
            TypeResult::result(Type::Int, Prop::TT, Prop::FF, Obj::int(5))
        );
    }

    #[test]
    fn lift_subst_substitutes_into_props() {
        let r = TypeResult::result(
            Type::bool(),
            Prop::is_type(x(), Type::Int),
            Prop::not_type(x(), Type::Int),
            Obj::Null,
        );
        let lifted = lift_subst(&r, "x", &Obj::var("n"), &Type::Top);
        assert_eq!(
            lifted,
            TypeResult::result(
                Type::bool(),
                Prop::is_type(Obj::var("n"), Type::Int),
                Prop::not_type(Obj::var("n"), Type::Int),
                Obj::Null,
            )
        );
    }

    #[test]
    fn union_equality_is_order_insensitive() {
        let a = Type::union(vec![Type::Int, Type::True, Type::Int]);
        let b = Type::union(vec![Type::True, Type::Int]);
        assert_eq!(a, b);
    }

    #[test]
    fn function_subst_avoids_capture() {
        // (-> (y : Int) (Result Int tt tt (+ x y)))[x := y] must rename the binder.
        let range = TypeResult::result(Type::Int, Prop::TT, Prop::TT, Obj::sum(x(), y()));
        let t = Type::fun("y", Type::Int, range);
        let out = subst_type(&t, "x", &y());
        match out {
            Type::Fun { param, range, .. } => {
                assert_ne!(param, "y");
                let mut fv = BTreeSet::new();
                range.free_vars(&mut fv);
                assert!(fv.contains("y"));
                assert!(fv.contains(&param));
            }
            other => panic!("expected function type, got {other:?}"),
        }
    }

    // Property-test generators for objects.
    fn arb_obj() -> impl Strategy<Value = Obj> {
        let leaf = prop_oneof![
            Just(Obj::var("x")),
            Just(Obj::var("y")),
            Just(Obj::var("z")),
            (-4i64..=4).prop_map(Obj::int),
        ];
        leaf.prop_recursive(3, 24, 4, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Obj::Pair(
                    Box::new(a),
                    Box::new(b)
                )),
                inner
                    .clone()
                    .prop_map(|o| Obj::Field(Field::Fst, Box::new(o))),
                inner
                    .clone()
                    .prop_map(|o| Obj::Field(Field::Snd, Box::new(o))),
                (inner.clone(), -3i64..=3).prop_map(|(o, n)| Obj::scale(n, o)),
                (inner.clone(), inner).prop_map(|(a, b)| Obj::sum(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn normalize_obj_idempotent(o in arb_obj()) {
            let once = normalize_obj(&o);
            let twice = normalize_obj(&once);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn identity_subst_is_identity(o in arb_obj()) {
            let normal = normalize_obj(&o);
            prop_assert_eq!(subst_obj(&normal, "x", &Obj::var("x")), normal.clone());
        }

        #[test]
        fn constructed_props_never_mention_null(o in arb_obj(), keep_null in proptest::bool::ANY) {
            let candidate = if keep_null { Obj::Null } else { o };
            let p = Prop::and(
                Prop::is_type(candidate.clone(), Type::Int),
                Prop::leq(candidate, Obj::int(0)),
            );
            prop_assert!(!p.mentions_null());
        }
    }
}
