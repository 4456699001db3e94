//! The file-based driver: `check`, `eval`, and `prove` over `.rtr` files,
//! with text or JSON diagnostics and a fixed exit-code contract:
//! 0 all checks pass, 1 type or prove failure, 2 parse error, 3 internal
//! invariant violation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::json;

use rtr_core::checker::{check, check_against, result_type_erased, Diagnostic};
use rtr_core::eval::{eval, EvalOutcome, DEFAULT_FUEL};
use rtr_core::prover::{Config, HybridEnv};
use rtr_core::{Expr, Obj, Prop, Span, Type, TypeResult};

use crate::lower::{SourceProgram, TopForm};
use crate::sexpr::{line_col, ParseError};

#[derive(Debug, Clone)]
pub struct Options {
    pub json: bool,
    pub fuel: u64,
    pub split_depth: usize,
    pub trace: bool,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            json: false,
            fuel: DEFAULT_FUEL,
            split_depth: 8,
            trace: false,
        }
    }
}

impl Options {
    pub fn config(&self) -> Config {
        Config {
            split_depth: self.split_depth,
            trace: self.trace,
            ..Config::default()
        }
    }
}

pub struct Driver<'a> {
    program: &'a SourceProgram,
    options: Options,
    env: HybridEnv,
    /// Monotone counter for names introduced when peeling top-level
    /// existentials into the environment.
    peeled: u64,
    pub output: String,
    pub failures: usize,
}

impl<'a> Driver<'a> {
    pub fn new(program: &'a SourceProgram, options: Options) -> Driver<'a> {
        let env = HybridEnv::new(options.config());
        Driver {
            program,
            options,
            env,
            peeled: 0,
            output: String::new(),
            failures: 0,
        }
    }

    fn emit(&mut self, line: &str) {
        self.output.push_str(line);
        self.output.push('\n');
    }

    fn report(&mut self, d: &Diagnostic) {
        self.failures += 1;
        let rendered = render_diagnostic(
            &self.program.path,
            &self.program.source,
            d,
            self.options.json,
        );
        self.emit(&rendered);
    }

    /// Peel existential binders off a result into the ambient environment,
    /// returning the plain components.
    fn peel_top(&mut self, r: TypeResult) -> (Type, Prop, Prop, Obj) {
        let mut cur = r;
        loop {
            match cur {
                TypeResult::Exists { var, ty, body } => {
                    let fresh = format!("%t{}", self.peeled);
                    self.peeled += 1;
                    let body = rtr_core::subst_result(&body, &var, &Obj::var(fresh.clone()));
                    self.env = self
                        .env
                        .assume(&Prop::is_type(Obj::var(fresh), ty.clone()));
                    cur = body;
                }
                TypeResult::Result {
                    ty,
                    then_prop,
                    else_prop,
                    obj,
                } => return (ty, then_prop, else_prop, obj),
            }
        }
    }

    fn bind_name(&mut self, name: &str, ty: Type, obj: Obj, then_p: Prop, else_p: Prop) {
        let xv = Obj::var(name.to_string());
        self.env = self.env.assume(&Prop::is_type(xv.clone(), ty));
        self.env = self.env.assume(&Prop::alias(xv.clone(), obj));
        if !(then_p == Prop::TT && else_p == Prop::TT) {
            let cond = Prop::or(
                Prop::and(Prop::is_type(xv.clone(), Type::False), else_p),
                Prop::and(Prop::not_type(xv, Type::False), then_p),
            );
            self.env = self.env.assume(&cond);
        }
    }

    /// Type check every form, extending the environment as definitions are
    /// processed. Returns the annotations/defines seen, for the evaluator.
    pub fn check_forms(&mut self) -> Vec<(Option<String>, Expr)> {
        let mut annotations: BTreeMap<String, Type> = BTreeMap::new();
        let mut checked = Vec::new();
        for form in &self.program.forms {
            match form {
                TopForm::Annotation { name, ty, .. } => {
                    annotations.insert(name.clone(), ty.clone());
                }
                TopForm::Define { name, expr, .. } => {
                    match annotations.get(name) {
                        Some(ann) => {
                            match check_against(&self.env, expr, ann) {
                                Ok(()) => self.emit(&format!("{name} : ok")),
                                Err(d) => self.report(&d),
                            }
                            // Later forms rely on the annotated type either
                            // way.
                            self.bind_name(name, ann.clone(), Obj::Null, Prop::TT, Prop::TT);
                        }
                        None => match check(&self.env, expr) {
                            Ok(r) => {
                                let erased = result_type_erased(&r);
                                let (ty, then_p, else_p, obj) = self.peel_top(r);
                                self.emit(&format!("{name} : {erased}"));
                                self.bind_name(name, ty, obj, then_p, else_p);
                            }
                            Err(d) => {
                                self.report(&d);
                                self.bind_name(name, Type::Top, Obj::Null, Prop::TT, Prop::TT);
                            }
                        },
                    }
                    checked.push((Some(name.clone()), expr.clone()));
                }
                TopForm::Bare(expr) => {
                    match check(&self.env, expr) {
                        Ok(r) => {
                            let erased = result_type_erased(&r);
                            self.emit(&format!("- : {erased}"));
                        }
                        Err(d) => self.report(&d),
                    }
                    checked.push((None, expr.clone()));
                }
                TopForm::Prove { .. } => {}
            }
        }
        checked
    }

    /// Evaluate definitions and bare expressions in order, printing the
    /// value of each bare expression.
    pub fn eval_forms(&mut self, forms: &[(Option<String>, Expr)]) -> Result<(), String> {
        let mut rho: rtr_core::RuntimeEnv = BTreeMap::new();
        for (name, expr) in forms {
            match eval(&rho, expr, self.options.fuel) {
                EvalOutcome::Value(v) => match name {
                    Some(n) => {
                        rho.insert(n.clone(), v);
                    }
                    None => {
                        let line = v.to_string();
                        self.emit(&line);
                    }
                },
                EvalOutcome::FuelExhausted => {
                    return Err(format!("fuel exhausted while evaluating `{expr}`"));
                }
                EvalOutcome::Stuck(s) => {
                    let (line, col) = line_col(&self.program.source, s.span.lo);
                    return Err(format!(
                        "stuck at {}:{line}:{col}: {}",
                        self.program.path, s.reason
                    ));
                }
            }
        }
        Ok(())
    }

    /// Run every prove query, printing one verdict per query.
    pub fn prove_forms(&mut self) {
        let mut index = 0usize;
        for form in &self.program.forms {
            if let TopForm::Prove {
                assumptions, goal, ..
            } = form
            {
                index += 1;
                let mut env = HybridEnv::new(self.options.config());
                for p in assumptions {
                    env = env.assume(p);
                }
                let verdict = env.proves(goal);
                if !verdict {
                    self.failures += 1;
                }
                let line = format!(
                    "query {index}: {}",
                    if verdict { "proved" } else { "not proved" }
                );
                self.emit(&line);
            }
        }
        if index == 0 {
            self.emit("no prove queries");
        }
    }
}

pub fn render_parse_error(path: &str, source: &str, e: &ParseError, as_json: bool) -> String {
    let (line, col) = line_col(source, e.span.lo);
    if as_json {
        json!({
            "kind": "parse-error",
            "message": e.message,
            "span": span_json(source, e.span),
            "expected": serde_json::Value::Null,
            "actual": serde_json::Value::Null,
            "query": serde_json::Value::Null,
        })
        .to_string()
    } else {
        format!("parse error: {}\n  --> {path}:{line}:{col}", e.message)
    }
}

fn span_json(source: &str, span: Span) -> serde_json::Value {
    let (line, col) = line_col(source, span.lo);
    json!({"lo": span.lo, "hi": span.hi, "line": line, "col": col})
}

pub fn render_diagnostic(path: &str, source: &str, d: &Diagnostic, as_json: bool) -> String {
    if as_json {
        return json!({
            "kind": "type-error",
            "message": d.message,
            "span": span_json(source, d.span),
            "expected": d.expected,
            "actual": d.actual,
            "query": d.query,
        })
        .to_string();
    }
    let (line, col) = line_col(source, d.span.lo);
    let mut out = String::new();
    let _ = write!(out, "error: {}\n  --> {path}:{line}:{col}", d.message);
    if let Some(e) = &d.expected {
        let _ = write!(out, "\n  expected: {e}");
    }
    if let Some(a) = &d.actual {
        let _ = write!(out, "\n  given: {a}");
    }
    if let Some(q) = &d.query {
        let _ = write!(out, "\n  query: {q}");
    }
    out
}
