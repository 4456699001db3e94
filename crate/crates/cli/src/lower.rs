//! Lowering from s-expressions to the core syntax.
//!
//! Expression binders are freshened here so the checker sees alpha-unique
//! programs: the first occurrence of a surface name keeps it, later
//! shadowing occurrences get a `%`-suffixed variant (`%` is rejected in
//! source identifiers, so generated names cannot collide).

use std::collections::BTreeSet;

use num_bigint::BigInt;

use rtr_core::ast::fresh_name;
use rtr_core::{Expr, ExprKind, Field, Obj, PrimOp, Prop, Span, Type, TypeResult};

use crate::sexpr::{ParseError, SExpr};

#[derive(Debug, Clone)]
pub enum TopForm {
    Annotation { name: String, ty: Type, span: Span },
    Define { name: String, expr: Expr, span: Span },
    Bare(Expr),
    Prove { assumptions: Vec<Prop>, goal: Prop, span: Span },
}

#[derive(Debug, Clone)]
pub struct SourceProgram {
    pub path: String,
    pub source: String,
    pub forms: Vec<TopForm>,
}

const KEYWORDS: &[&str] = &[
    "lambda", "if", "let", "cons", "fst", "snd", "vec", "true", "false", "define", "prove",
    "tt", "ff", "and", "or", "null", "Top", "Int", "True", "False", "Bool", "Vec", "Pair", "U",
    "Refine", "Result", "->", ":", "!", "==", "<=", "<", "*", "+",
];

struct Lowerer {
    /// Surface name to freshened name, innermost binding last.
    scope: Vec<(String, String)>,
    used: BTreeSet<String>,
}

pub fn lower_program(path: &str, source: &str, forms: Vec<SExpr>) -> Result<SourceProgram, ParseError> {
    let mut lowered = Vec::new();
    let mut defined = BTreeSet::new();
    for form in forms {
        lowered.push(lower_top(&form, &mut defined)?);
    }
    Ok(SourceProgram {
        path: path.to_string(),
        source: source.to_string(),
        forms: lowered,
    })
}

fn lower_top(form: &SExpr, defined: &mut BTreeSet<String>) -> Result<TopForm, ParseError> {
    if let SExpr::List { items, span } = form {
        if let Some(head) = items.first().and_then(SExpr::atom_text) {
            match head {
                ":" if items.len() == 3 => {
                    let name = ident(&items[1])?;
                    let mut lw = Lowerer::new();
                    let ty = lw.lower_type(&items[2])?;
                    return Ok(TopForm::Annotation {
                        name,
                        ty,
                        span: *span,
                    });
                }
                "define" => {
                    if items.len() != 3 {
                        return Err(ParseError::new(*span, "define expects a name and a body"));
                    }
                    let name = ident(&items[1])?;
                    if !defined.insert(name.clone()) {
                        return Err(ParseError::new(
                            items[1].span(),
                            format!("duplicate definition of `{name}`"),
                        ));
                    }
                    let mut lw = Lowerer::new();
                    let expr = lw.lower_expr(&items[2])?;
                    return Ok(TopForm::Define {
                        name,
                        expr,
                        span: *span,
                    });
                }
                "prove" => {
                    if items.len() != 3 {
                        return Err(ParseError::new(
                            *span,
                            "prove expects an assumption list and a goal",
                        ));
                    }
                    let SExpr::List {
                        items: assumption_items,
                        ..
                    } = &items[1]
                    else {
                        return Err(ParseError::new(
                            items[1].span(),
                            "prove assumptions must be a list of propositions",
                        ));
                    };
                    let mut lw = Lowerer::new();
                    let assumptions = assumption_items
                        .iter()
                        .map(|p| lw.lower_prop(p))
                        .collect::<Result<Vec<_>, _>>()?;
                    let goal = lw.lower_prop(&items[2])?;
                    return Ok(TopForm::Prove {
                        assumptions,
                        goal,
                        span: *span,
                    });
                }
                _ => {}
            }
        }
    }
    let mut lw = Lowerer::new();
    Ok(TopForm::Bare(lw.lower_expr(form)?))
}

fn ident(s: &SExpr) -> Result<String, ParseError> {
    let Some(text) = s.atom_text() else {
        return Err(ParseError::new(s.span(), "expected an identifier"));
    };
    check_ident(text, s.span())?;
    Ok(text.to_string())
}

fn check_ident(text: &str, span: Span) -> Result<(), ParseError> {
    if text.is_empty() || text.contains('%') {
        return Err(ParseError::new(
            span,
            format!("invalid identifier `{text}` (`%` is reserved)"),
        ));
    }
    if KEYWORDS.contains(&text) || PrimOp::from_name(text).is_some() {
        return Err(ParseError::new(
            span,
            format!("`{text}` is reserved and cannot be used as a name"),
        ));
    }
    if text.parse::<i64>().is_ok() || BigInt::parse_bytes(text.as_bytes(), 10).is_some() {
        return Err(ParseError::new(span, format!("`{text}` is not a name")));
    }
    Ok(())
}

fn parse_int(text: &str) -> Option<BigInt> {
    let stripped = text.strip_prefix('-').unwrap_or(text);
    if stripped.is_empty() || !stripped.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::parse_bytes(text.as_bytes(), 10)
}

impl Lowerer {
    fn new() -> Lowerer {
        Lowerer {
            scope: Vec::new(),
            used: BTreeSet::new(),
        }
    }

    fn resolve(&self, name: &str) -> String {
        self.scope
            .iter()
            .rev()
            .find(|(surface, _)| surface == name)
            .map(|(_, unique)| unique.clone())
            .unwrap_or_else(|| name.to_string())
    }

    /// Bind a surface name, freshening on shadowing, and run `body`.
    fn with_binder<T>(
        &mut self,
        surface: &str,
        body: impl FnOnce(&mut Lowerer, &str) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        let unique = fresh_name(surface, &self.used);
        self.used.insert(unique.clone());
        self.scope.push((surface.to_string(), unique.clone()));
        let out = body(self, &unique);
        self.scope.pop();
        out
    }

    /// Bind a type-level name without freshening (shadowing is resolved
    /// lexically; generated expression names contain `%` and cannot be
    /// captured).
    fn with_type_binder<T>(
        &mut self,
        surface: &str,
        body: impl FnOnce(&mut Lowerer) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        self.scope.push((surface.to_string(), surface.to_string()));
        let out = body(self);
        self.scope.pop();
        out
    }

    fn lower_expr(&mut self, s: &SExpr) -> Result<Expr, ParseError> {
        let span = s.span();
        match s {
            SExpr::Atom { text, .. } => {
                if let Some(n) = parse_int(text) {
                    return Ok(Expr::new(ExprKind::Int(n), span));
                }
                match text.as_str() {
                    "true" => Ok(Expr::new(ExprKind::True, span)),
                    "false" => Ok(Expr::new(ExprKind::False, span)),
                    _ => {
                        if let Some(p) = PrimOp::from_name(text) {
                            return Ok(Expr::new(ExprKind::Prim(p), span));
                        }
                        check_ident(text, span)?;
                        Ok(Expr::new(ExprKind::Var(self.resolve(text)), span))
                    }
                }
            }
            SExpr::List { items, .. } => {
                let head = items.first().and_then(SExpr::atom_text);
                match head {
                    Some("lambda") => {
                        if items.len() != 3 {
                            return Err(ParseError::new(
                                span,
                                "lambda expects a parameter list and a body",
                            ));
                        }
                        let (name, ty) = self.lower_typed_binder(&items[1])?;
                        let body_s = &items[2];
                        self.with_binder(&name, |lw, unique| {
                            let body = lw.lower_expr(body_s)?;
                            Ok(Expr::new(
                                ExprKind::Abs {
                                    param: unique.to_string(),
                                    param_ty: ty,
                                    body: Box::new(body),
                                },
                                span,
                            ))
                        })
                    }
                    Some("if") => {
                        if items.len() != 4 {
                            return Err(ParseError::new(span, "if expects three subexpressions"));
                        }
                        Ok(Expr::new(
                            ExprKind::If(
                                Box::new(self.lower_expr(&items[1])?),
                                Box::new(self.lower_expr(&items[2])?),
                                Box::new(self.lower_expr(&items[3])?),
                            ),
                            span,
                        ))
                    }
                    Some("let") => {
                        if items.len() != 3 {
                            return Err(ParseError::new(span, "let expects a binding and a body"));
                        }
                        let SExpr::List {
                            items: binding, ..
                        } = &items[1]
                        else {
                            return Err(ParseError::new(
                                items[1].span(),
                                "let binding must be `(name expr)`",
                            ));
                        };
                        if binding.len() != 2 {
                            return Err(ParseError::new(
                                items[1].span(),
                                "let binding must be `(name expr)`",
                            ));
                        }
                        let name = ident(&binding[0])?;
                        let bound = self.lower_expr(&binding[1])?;
                        let body_s = &items[2];
                        self.with_binder(&name, |lw, unique| {
                            let body = lw.lower_expr(body_s)?;
                            Ok(Expr::new(
                                ExprKind::Let {
                                    name: unique.to_string(),
                                    bound: Box::new(bound),
                                    body: Box::new(body),
                                },
                                span,
                            ))
                        })
                    }
                    Some("cons") => {
                        if items.len() != 3 {
                            return Err(ParseError::new(span, "cons expects two subexpressions"));
                        }
                        Ok(Expr::new(
                            ExprKind::Cons(
                                Box::new(self.lower_expr(&items[1])?),
                                Box::new(self.lower_expr(&items[2])?),
                            ),
                            span,
                        ))
                    }
                    Some("fst") => {
                        if items.len() != 2 {
                            return Err(ParseError::new(span, "fst expects one subexpression"));
                        }
                        Ok(Expr::new(
                            ExprKind::Fst(Box::new(self.lower_expr(&items[1])?)),
                            span,
                        ))
                    }
                    Some("snd") => {
                        if items.len() != 2 {
                            return Err(ParseError::new(span, "snd expects one subexpression"));
                        }
                        Ok(Expr::new(
                            ExprKind::Snd(Box::new(self.lower_expr(&items[1])?)),
                            span,
                        ))
                    }
                    Some("vec") => {
                        let elems = items[1..]
                            .iter()
                            .map(|e| self.lower_expr(e))
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok(Expr::new(ExprKind::VecLit(elems), span))
                    }
                    _ => {
                        if items.len() != 2 {
                            return Err(ParseError::new(
                                span,
                                "application expects exactly one argument",
                            ));
                        }
                        Ok(Expr::new(
                            ExprKind::App(
                                Box::new(self.lower_expr(&items[0])?),
                                Box::new(self.lower_expr(&items[1])?),
                            ),
                            span,
                        ))
                    }
                }
            }
        }
    }

    /// Parse `(name : Type)`.
    fn lower_typed_binder(&mut self, s: &SExpr) -> Result<(String, Type), ParseError> {
        let SExpr::List { items, span } = s else {
            return Err(ParseError::new(s.span(), "expected `(name : Type)`"));
        };
        if items.len() != 3 || items[1].atom_text() != Some(":") {
            return Err(ParseError::new(*span, "expected `(name : Type)`"));
        }
        let name = ident(&items[0])?;
        let ty = self.lower_type(&items[2])?;
        Ok((name, ty))
    }

    pub fn lower_type(&mut self, s: &SExpr) -> Result<Type, ParseError> {
        match s {
            SExpr::Atom { text, span } => match text.as_str() {
                "Top" => Ok(Type::Top),
                "Int" => Ok(Type::Int),
                "True" => Ok(Type::True),
                "False" => Ok(Type::False),
                "Bool" => Ok(Type::bool()),
                "Vec" => Ok(Type::Vec),
                other => Err(ParseError::new(
                    *span,
                    format!("unknown type `{other}`"),
                )),
            },
            SExpr::List { items, span } => {
                let head = items.first().and_then(SExpr::atom_text).ok_or_else(|| {
                    ParseError::new(*span, "expected a type form")
                })?;
                match head {
                    "Pair" => {
                        if items.len() != 3 {
                            return Err(ParseError::new(*span, "Pair expects two types"));
                        }
                        Ok(Type::pair(
                            self.lower_type(&items[1])?,
                            self.lower_type(&items[2])?,
                        ))
                    }
                    "U" => {
                        let members = items[1..]
                            .iter()
                            .map(|t| self.lower_type(t))
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok(Type::union(members))
                    }
                    "->" => {
                        if items.len() != 3 {
                            return Err(ParseError::new(
                                *span,
                                "-> expects a parameter list and a range",
                            ));
                        }
                        let (name, domain) = self.lower_typed_binder(&items[1])?;
                        let range_s = &items[2];
                        let range = self
                            .with_type_binder(&name, |lw| lw.lower_result(range_s))?;
                        Ok(Type::fun(name, domain, range))
                    }
                    "Refine" => {
                        if items.len() != 3 {
                            return Err(ParseError::new(
                                *span,
                                "Refine expects a binder and a proposition",
                            ));
                        }
                        let (name, base) = self.lower_typed_binder(&items[1])?;
                        let prop_s = &items[2];
                        let prop = self.with_type_binder(&name, |lw| lw.lower_prop(prop_s))?;
                        Ok(Type::refine(name, base, prop))
                    }
                    other => Err(ParseError::new(*span, format!("unknown type form `{other}`"))),
                }
            }
        }
    }

    fn lower_result(&mut self, s: &SExpr) -> Result<TypeResult, ParseError> {
        if let SExpr::List { items, span } = s {
            if items.first().and_then(SExpr::atom_text) == Some("Result") {
                if items.len() != 5 {
                    return Err(ParseError::new(
                        *span,
                        "Result expects a type, two propositions, and an object",
                    ));
                }
                let ty = self.lower_type(&items[1])?;
                let then_prop = self.lower_prop(&items[2])?;
                let else_prop = self.lower_prop(&items[3])?;
                let obj = self.lower_obj(&items[4])?;
                return Ok(TypeResult::result(ty, then_prop, else_prop, obj));
            }
        }
        Ok(TypeResult::plain(self.lower_type(s)?))
    }

    pub fn lower_prop(&mut self, s: &SExpr) -> Result<Prop, ParseError> {
        match s {
            SExpr::Atom { text, span } => match text.as_str() {
                "tt" => Ok(Prop::TT),
                "ff" => Ok(Prop::FF),
                other => Err(ParseError::new(
                    *span,
                    format!("unknown proposition `{other}`"),
                )),
            },
            SExpr::List { items, span } => {
                let head = items.first().and_then(SExpr::atom_text).ok_or_else(|| {
                    ParseError::new(*span, "expected a proposition form")
                })?;
                let expect = |n: usize| -> Result<(), ParseError> {
                    if items.len() != n + 1 {
                        Err(ParseError::new(
                            *span,
                            format!("`{head}` expects {n} arguments"),
                        ))
                    } else {
                        Ok(())
                    }
                };
                match head {
                    ":" => {
                        expect(2)?;
                        Ok(Prop::is_type(
                            self.lower_obj(&items[1])?,
                            self.lower_type(&items[2])?,
                        ))
                    }
                    "!" => {
                        expect(2)?;
                        Ok(Prop::not_type(
                            self.lower_obj(&items[1])?,
                            self.lower_type(&items[2])?,
                        ))
                    }
                    "and" => {
                        expect(2)?;
                        Ok(Prop::and(
                            self.lower_prop(&items[1])?,
                            self.lower_prop(&items[2])?,
                        ))
                    }
                    "or" => {
                        expect(2)?;
                        Ok(Prop::or(
                            self.lower_prop(&items[1])?,
                            self.lower_prop(&items[2])?,
                        ))
                    }
                    "==" => {
                        expect(2)?;
                        Ok(Prop::alias(
                            self.lower_obj(&items[1])?,
                            self.lower_obj(&items[2])?,
                        ))
                    }
                    "<=" => {
                        expect(2)?;
                        Ok(Prop::leq(
                            self.lower_obj(&items[1])?,
                            self.lower_obj(&items[2])?,
                        ))
                    }
                    "<" => {
                        expect(2)?;
                        Ok(Prop::lt(
                            self.lower_obj(&items[1])?,
                            self.lower_obj(&items[2])?,
                        ))
                    }
                    other => Err(ParseError::new(
                        *span,
                        format!("unknown proposition form `{other}`"),
                    )),
                }
            }
        }
    }

    pub fn lower_obj(&mut self, s: &SExpr) -> Result<Obj, ParseError> {
        match s {
            SExpr::Atom { text, span } => {
                if let Some(n) = parse_int(text) {
                    return Ok(Obj::int(n));
                }
                if text == "null" || text == "∅" {
                    return Ok(Obj::Null);
                }
                check_ident(text, *span)?;
                Ok(Obj::var(self.resolve(text)))
            }
            SExpr::List { items, span } => {
                let head = items.first().and_then(SExpr::atom_text).ok_or_else(|| {
                    ParseError::new(*span, "expected an object form")
                })?;
                match head {
                    "fst" | "snd" | "len" => {
                        if items.len() != 2 {
                            return Err(ParseError::new(
                                *span,
                                format!("`{head}` expects one object"),
                            ));
                        }
                        let field = match head {
                            "fst" => Field::Fst,
                            "snd" => Field::Snd,
                            _ => Field::Len,
                        };
                        Ok(Obj::field(field, self.lower_obj(&items[1])?))
                    }
                    "*" => {
                        if items.len() != 3 {
                            return Err(ParseError::new(
                                *span,
                                "`*` expects an integer and an object",
                            ));
                        }
                        let coeff = items[1]
                            .atom_text()
                            .and_then(parse_int)
                            .ok_or_else(|| {
                                ParseError::new(items[1].span(), "`*` coefficient must be an integer")
                            })?;
                        Ok(Obj::scale(coeff, self.lower_obj(&items[2])?))
                    }
                    "+" => {
                        if items.len() != 3 {
                            return Err(ParseError::new(*span, "`+` expects two objects"));
                        }
                        Ok(Obj::sum(
                            self.lower_obj(&items[1])?,
                            self.lower_obj(&items[2])?,
                        ))
                    }
                    other => Err(ParseError::new(
                        *span,
                        format!("unknown object form `{other}`"),
                    )),
                }
            }
        }
    }
}
