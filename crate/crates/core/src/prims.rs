//! Primitive operations: the table of dependent function types assigned to
//! each primitive, and the runtime meaning applied by the evaluator.
//!
//! Binary arithmetic and comparison primitives take a single pair argument
//! so that both operands are addressable as `(fst p)` and `(snd p)` field
//! objects.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::ast::{Field, Obj, Prop, Type, TypeResult, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PrimOp {
    Not,
    Add1,
    IsInt,
    IsBool,
    IsPair,
    Plus,
    Leq,
    Lt,
    Eqi,
    Len,
    VecRef,
}

pub const ALL_PRIMS: [PrimOp; 11] = [
    PrimOp::Not,
    PrimOp::Add1,
    PrimOp::IsInt,
    PrimOp::IsBool,
    PrimOp::IsPair,
    PrimOp::Plus,
    PrimOp::Leq,
    PrimOp::Lt,
    PrimOp::Eqi,
    PrimOp::Len,
    PrimOp::VecRef,
];

impl PrimOp {
    pub fn name(self) -> &'static str {
        match self {
            PrimOp::Not => "not",
            PrimOp::Add1 => "add1",
            PrimOp::IsInt => "int?",
            PrimOp::IsBool => "bool?",
            PrimOp::IsPair => "pair?",
            PrimOp::Plus => "plus",
            PrimOp::Leq => "leq",
            PrimOp::Lt => "lt",
            PrimOp::Eqi => "eqi",
            PrimOp::Len => "len",
            PrimOp::VecRef => "vec-ref",
        }
    }

    pub fn from_name(name: &str) -> Option<PrimOp> {
        ALL_PRIMS.iter().copied().find(|p| p.name() == name)
    }
}

impl fmt::Display for PrimOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// A primitive application outside its domain. Reachable only from
/// ill-typed terms; the evaluator surfaces it as a stuck error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimError {
    pub op: PrimOp,
    pub reason: String,
}

fn fst_of(x: &str) -> Obj {
    Obj::field(Field::Fst, Obj::var(x))
}

fn snd_of(x: &str) -> Obj {
    Obj::field(Field::Snd, Obj::var(x))
}

/// The type of each primitive operation.
pub fn delta_type(p: PrimOp) -> Type {
    match p {
        PrimOp::Not => Type::fun(
            "x",
            Type::Top,
            TypeResult::result(
                Type::bool(),
                Prop::is_type(Obj::var("x"), Type::False),
                Prop::not_type(Obj::var("x"), Type::False),
                Obj::Null,
            ),
        ),
        PrimOp::Add1 => Type::fun(
            "x",
            Type::Int,
            TypeResult::result(
                Type::Int,
                Prop::TT,
                Prop::FF,
                Obj::sum(Obj::var("x"), Obj::int(1)),
            ),
        ),
        PrimOp::IsInt => predicate_type(Type::Int),
        PrimOp::IsBool => predicate_type(Type::bool()),
        PrimOp::IsPair => predicate_type(Type::pair(Type::Top, Type::Top)),
        PrimOp::Plus => Type::fun(
            "p",
            Type::pair(Type::Int, Type::Int),
            TypeResult::result(
                Type::Int,
                Prop::TT,
                Prop::FF,
                Obj::sum(fst_of("p"), snd_of("p")),
            ),
        ),
        PrimOp::Leq => Type::fun(
            "p",
            Type::pair(Type::Int, Type::Int),
            TypeResult::result(
                Type::bool(),
                Prop::leq(fst_of("p"), snd_of("p")),
                Prop::lt(snd_of("p"), fst_of("p")),
                Obj::Null,
            ),
        ),
        PrimOp::Lt => Type::fun(
            "p",
            Type::pair(Type::Int, Type::Int),
            TypeResult::result(
                Type::bool(),
                Prop::lt(fst_of("p"), snd_of("p")),
                Prop::leq(snd_of("p"), fst_of("p")),
                Obj::Null,
            ),
        ),
        PrimOp::Eqi => Type::fun(
            "p",
            Type::pair(Type::Int, Type::Int),
            TypeResult::result(
                Type::bool(),
                Prop::and(
                    Prop::leq(fst_of("p"), snd_of("p")),
                    Prop::leq(snd_of("p"), fst_of("p")),
                ),
                Prop::TT,
                Obj::Null,
            ),
        ),
        PrimOp::Len => Type::fun(
            "v",
            Type::Vec,
            TypeResult::result(
                Type::Int,
                Prop::TT,
                Prop::FF,
                Obj::field(Field::Len, Obj::var("v")),
            ),
        ),
        PrimOp::VecRef => Type::fun(
            "p",
            Type::refine(
                "q",
                Type::pair(Type::Vec, Type::Int),
                Prop::and(
                    Prop::leq(Obj::int(0), snd_of("q")),
                    Prop::lt(snd_of("q"), Obj::field(Field::Len, fst_of("q"))),
                ),
            ),
            TypeResult::result(Type::Int, Prop::TT, Prop::TT, Obj::Null),
        ),
    }
}

fn predicate_type(tested: Type) -> Type {
    Type::fun(
        "x",
        Type::Top,
        TypeResult::result(
            Type::bool(),
            Prop::is_type(Obj::var("x"), tested.clone()),
            Prop::not_type(Obj::var("x"), tested),
            Obj::Null,
        ),
    )
}

fn int_pair(op: PrimOp, v: &Value) -> Result<(BigInt, BigInt), PrimError> {
    match v {
        Value::Pair(a, b) => match (a.as_ref(), b.as_ref()) {
            (Value::Int(x), Value::Int(y)) => Ok((x.clone(), y.clone())),
            _ => Err(PrimError {
                op,
                reason: "expected a pair of integers".into(),
            }),
        },
        _ => Err(PrimError {
            op,
            reason: "expected a pair of integers".into(),
        }),
    }
}

/// The runtime meaning of each primitive. Type predicates never fail;
/// arithmetic primitives fail outside their domain with a distinguished
/// error that checked programs never trigger.
pub fn delta_apply(p: PrimOp, v: &Value) -> Result<Value, PrimError> {
    match p {
        PrimOp::Not => Ok(Value::bool(v.is_false())),
        PrimOp::Add1 => match v {
            Value::Int(n) => Ok(Value::Int(n + 1)),
            _ => Err(PrimError {
                op: p,
                reason: "expected an integer".into(),
            }),
        },
        PrimOp::IsInt => Ok(Value::bool(matches!(v, Value::Int(_)))),
        PrimOp::IsBool => Ok(Value::bool(matches!(v, Value::True | Value::False))),
        PrimOp::IsPair => Ok(Value::bool(matches!(v, Value::Pair(_, _)))),
        PrimOp::Plus => {
            let (a, b) = int_pair(p, v)?;
            Ok(Value::Int(a + b))
        }
        PrimOp::Leq => {
            let (a, b) = int_pair(p, v)?;
            Ok(Value::bool(a <= b))
        }
        PrimOp::Lt => {
            let (a, b) = int_pair(p, v)?;
            Ok(Value::bool(a < b))
        }
        PrimOp::Eqi => {
            let (a, b) = int_pair(p, v)?;
            Ok(Value::bool(a == b))
        }
        PrimOp::Len => match v {
            Value::Vector(items) => Ok(Value::Int(BigInt::from(items.len()))),
            _ => Err(PrimError {
                op: p,
                reason: "expected a vector".into(),
            }),
        },
        PrimOp::VecRef => match v {
            Value::Pair(vec, idx) => match (vec.as_ref(), idx.as_ref()) {
                (Value::Vector(items), Value::Int(i)) => {
                    match i.to_usize().filter(|i| *i < items.len()) {
                        Some(i) => Ok(Value::Int(items[i].clone())),
                        None => Err(PrimError {
                            op: p,
                            reason: format!("index {i} out of bounds for length {}", items.len()),
                        }),
                    }
                }
                _ => Err(PrimError {
                    op: p,
                    reason: "expected a pair of a vector and an integer".into(),
                }),
            },
            _ => Err(PrimError {
                op: p,
                reason: "expected a pair of a vector and an integer".into(),
            }),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_table_is_total() {
        for p in ALL_PRIMS {
            match delta_type(p) {
                Type::Fun { .. } => {}
                other => panic!("{p} has non-function type {other:?}"),
            }
        }
    }

    #[test]
    fn int_predicate_type_matches_table() {
        let expected = Type::fun(
            "x",
            Type::Top,
            TypeResult::result(
                Type::bool(),
                Prop::is_type(Obj::var("x"), Type::Int),
                Prop::not_type(Obj::var("x"), Type::Int),
                Obj::Null,
            ),
        );
        assert_eq!(delta_type(PrimOp::IsInt), expected);
    }

    #[test]
    fn add1_signature() {
        match delta_type(PrimOp::Add1) {
            Type::Fun { domain, range, .. } => {
                assert_eq!(*domain, Type::Int);
                match *range {
                    TypeResult::Result { ty, obj, .. } => {
                        assert_eq!(ty, Type::Int);
                        assert_eq!(obj, Obj::sum(Obj::var("x"), Obj::int(1)));
                    }
                    other => panic!("unexpected range {other:?}"),
                }
            }
            other => panic!("unexpected type {other:?}"),
        }
    }

    #[test]
    fn leq_else_prop_is_reversed_strict() {
        // Over the integers, not(a <= b) iff b < a; checked by brute force.
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                assert_eq!(!(a <= b), b < a);
            }
        }
        match delta_type(PrimOp::Leq) {
            Type::Fun { range, .. } => match *range {
                TypeResult::Result { else_prop, .. } => {
                    assert_eq!(
                        else_prop,
                        Prop::lt(
                            Obj::field(Field::Snd, Obj::var("p")),
                            Obj::field(Field::Fst, Obj::var("p"))
                        )
                    );
                }
                other => panic!("unexpected range {other:?}"),
            },
            other => panic!("unexpected type {other:?}"),
        }
    }

    #[test]
    fn delta_apply_basics() {
        assert_eq!(
            delta_apply(PrimOp::Add1, &Value::int(1)).unwrap(),
            Value::int(2)
        );
        assert_eq!(
            delta_apply(PrimOp::IsInt, &Value::True).unwrap(),
            Value::False
        );
        let vec = Value::Vector(vec![10.into(), 20.into(), 30.into()]);
        assert_eq!(
            delta_apply(PrimOp::VecRef, &Value::pair(vec, Value::int(2))).unwrap(),
            Value::int(30)
        );
    }

    #[test]
    fn vec_ref_out_of_bounds_is_an_error() {
        let vec = Value::Vector(vec![1.into()]);
        assert!(delta_apply(PrimOp::VecRef, &Value::pair(vec, Value::int(1))).is_err());
    }

    #[test]
    fn predicates_never_error() {
        let samples = [
            Value::int(0),
            Value::True,
            Value::False,
            Value::Prim(PrimOp::Not),
            Value::pair(Value::int(1), Value::True),
            Value::Vector(vec![]),
        ];
        for p in [PrimOp::Not, PrimOp::IsInt, PrimOp::IsBool, PrimOp::IsPair] {
            for v in &samples {
                assert!(delta_apply(p, v).is_ok(), "{p} errored on {v:?}");
            }
        }
    }
}
