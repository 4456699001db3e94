//! The entailment engine: a hybrid environment storing per-object type
//! facts, alias classes with deterministic representatives, a store of
//! linear arithmetic atoms, and a worklist of unprocessed disjunctions.
//!
//! `assume` saturates eagerly: conjunctions split, aliases merge classes,
//! refinements unfold, type atoms about field paths refine their base
//! object through the update metafunction, and arithmetic atoms land in
//! the theory store. `proves` is a terminating, sound-but-incomplete
//! decision procedure: disjunctions are case-split up to a configured
//! depth, type goals go through subtyping on recorded positive types, and
//! arithmetic goals are discharged by Fourier-Motzkin entailment.
//!
//! Incompleteness always surfaces as a `false` answer, never as an unsound
//! `true`. Proving a goal about an object requires recorded evidence that
//! the object denotes at all (an entry, or structure derived from one), so
//! goals like `(fst x) ∈ Int` are unprovable from an empty environment.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::ast::{subst_prop, Field, Name, Obj, Prop, Type};
use crate::lia::{self, Constraint, ConstraintSys, LinExpr, Rel};
use crate::subtype::subtype_with_ctx;

/// Tunable limits for the prover and theory solver.
#[derive(Debug, Clone)]
pub struct Config {
    /// Bound on nested disjunction case-splits in `proves`.
    pub split_depth: usize,
    /// Bound on intermediate constraint counts in the theory solver.
    pub fm_size_guard: usize,
    /// Hard recursion guard breaking prover/subtyping cycles.
    pub max_depth: usize,
    /// Print entailment queries as they are solved.
    pub trace: bool,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            split_depth: 8,
            fm_size_guard: lia::DEFAULT_SIZE_GUARD,
            max_depth: 64,
            trace: false,
        }
    }
}

/// Budget threaded by value through every prover and subtyping recursion.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Ctx {
    pub depth: usize,
    pub splits: usize,
    pub fresh: u64,
}

impl Ctx {
    fn new(config: &Config) -> Ctx {
        Ctx {
            depth: config.max_depth,
            splits: config.split_depth,
            fresh: 0,
        }
    }

    pub(crate) fn descend(&self) -> Option<Ctx> {
        if self.depth == 0 {
            None
        } else {
            Some(Ctx {
                depth: self.depth - 1,
                ..*self
            })
        }
    }

    pub(crate) fn fresh_var(&mut self) -> Name {
        let n = self.fresh;
        self.fresh += 1;
        format!("%g{n}")
    }
}

/// Positive and negative type information recorded for one object.
#[derive(Debug, Clone, Default)]
struct TypeEntry {
    positive: Option<Type>,
    negatives: Vec<Type>,
}

impl TypeEntry {
    fn positive_or_top(&self) -> Type {
        self.positive.clone().unwrap_or(Type::Top)
    }
}

/// One stored theory atom: `lhs <= rhs` or `lhs < rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct LiaAtom {
    lhs: Obj,
    rhs: Obj,
    strict: bool,
}

/// The hybrid proposition environment. A value: `assume` returns an
/// extended copy and `proves` is pure, so environments may be shared and
/// queried concurrently.
#[derive(Debug, Clone)]
pub struct HybridEnv {
    config: Arc<Config>,
    /// Union-find forest over alias-equivalent objects. Representatives
    /// are the least member under the derived object ordering.
    parents: BTreeMap<Obj, Obj>,
    type_map: BTreeMap<Obj, TypeEntry>,
    lia_store: Vec<LiaAtom>,
    worklist: Vec<Prop>,
    absurd: bool,
}

/// Polarity of an update: positive information restricts, negative removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Pos,
    Neg,
}

impl Default for HybridEnv {
    fn default() -> HybridEnv {
        HybridEnv::new(Config::default())
    }
}

impl HybridEnv {
    pub fn new(config: Config) -> HybridEnv {
        HybridEnv {
            config: Arc::new(config),
            parents: BTreeMap::new(),
            type_map: BTreeMap::new(),
            lia_store: Vec::new(),
            worklist: Vec::new(),
            absurd: false,
        }
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub(crate) fn fresh_ctx(&self) -> Ctx {
        Ctx::new(&self.config)
    }

    pub fn is_absurd(&self) -> bool {
        self.absurd
    }

    /// True if a type fact was ever recorded for this object's class.
    pub fn is_bound(&self, name: &str) -> bool {
        let o = self.canon(&Obj::var(name));
        self.type_map.contains_key(&o)
    }

    /// The canonical form of an object: children canonicalized, then the
    /// whole object resolved to its alias-class representative.
    pub fn canon(&self, o: &Obj) -> Obj {
        let rebuilt = match o {
            Obj::Null => Obj::Null,
            Obj::Var(_) => o.clone(),
            Obj::Field(f, b) => Obj::field(*f, self.canon(b)),
            Obj::Pair(a, b) => Obj::pair(self.canon(a), self.canon(b)),
            Obj::Linear(l) => {
                let mut acc = Obj::int(l.constant.clone());
                for (base, coeff) in &l.terms {
                    acc = Obj::sum(acc, Obj::scale(coeff.clone(), self.canon(base)));
                }
                acc
            }
        };
        self.find(rebuilt)
    }

    fn find(&self, mut o: Obj) -> Obj {
        while let Some(p) = self.parents.get(&o) {
            o = p.clone();
        }
        o
    }

    /// Extend the environment with a proposition and saturate.
    pub fn assume(&self, p: &Prop) -> HybridEnv {
        let mut next = self.clone();
        let mut ctx = Ctx::new(&self.config);
        next.assume_inner(p, &mut ctx);
        next
    }

    /// The strongest recorded positive type for an object, or `None` when
    /// the environment holds no evidence that the object denotes a value.
    /// Variables always denote; field paths and linear combinations need a
    /// recorded entry or enough structure on their base object.
    pub fn lookup_positive(&self, o: &Obj) -> Option<Type> {
        let mut ctx = Ctx::new(&self.config);
        self.lookup_pos(&self.canon(o), &mut ctx)
    }

    /// Decide whether the environment entails the proposition. `true` is
    /// only answered when the goal is derivable; failures to find a proof
    /// answer `false`.
    pub fn proves(&self, goal: &Prop) -> bool {
        let mut ctx = Ctx::new(&self.config);
        let verdict = self.proves_inner(goal, &mut ctx);
        if self.config.trace {
            println!("[prove] {goal} => {verdict}");
        }
        verdict
    }

    // ------------------------------------------------------------------
    // assume
    // ------------------------------------------------------------------

    pub(crate) fn assume_inner(&mut self, p: &Prop, ctx: &mut Ctx) {
        if self.absurd {
            return;
        }
        match p {
            Prop::TT => {}
            Prop::FF => self.absurd = true,
            Prop::And(a, b) => {
                self.assume_inner(a, ctx);
                self.assume_inner(b, ctx);
            }
            Prop::Or(_, _) => self.worklist.push(p.clone()),
            Prop::Alias(a, b) => {
                let a = self.canon(a);
                let b = self.canon(b);
                if a == b {
                    return;
                }
                match (&a, &b) {
                    // Two distinct constants can never denote the same
                    // value; neither can an integer-valued object and a
                    // pair object.
                    (Obj::Linear(la), Obj::Linear(lb))
                        if la.is_constant() && lb.is_constant() =>
                    {
                        self.absurd = true;
                    }
                    (Obj::Linear(_), Obj::Pair(_, _)) | (Obj::Pair(_, _), Obj::Linear(_)) => {
                        self.absurd = true;
                    }
                    (Obj::Pair(a1, a2), Obj::Pair(b1, b2)) => {
                        let first = Prop::alias((**a1).clone(), (**b1).clone());
                        let second = Prop::alias((**a2).clone(), (**b2).clone());
                        self.assume_inner(&first, ctx);
                        self.assume_inner(&second, ctx);
                    }
                    _ => self.union(a, b, ctx),
                }
            }
            Prop::Leq(a, b) => self.assume_lia(a, b, false, ctx),
            Prop::Lt(a, b) => self.assume_lia(a, b, true, ctx),
            Prop::IsType(o, t) => {
                let o = self.canon(o);
                self.assume_is_type(&o, t, ctx);
            }
            Prop::NotType(o, t) => {
                let o = self.canon(o);
                self.assume_not_type(&o, t, ctx);
            }
        }
    }

    fn assume_lia(&mut self, lhs: &Obj, rhs: &Obj, strict: bool, ctx: &mut Ctx) {
        let lhs = self.canon(lhs);
        let rhs = self.canon(rhs);
        let (Some(lb), Some(rb)) = (int_bases(&lhs), int_bases(&rhs)) else {
            // A comparison whose object can never denote an integer has no
            // models.
            self.absurd = true;
            return;
        };
        // Satisfaction of the atom forces every base to denote an integer.
        for b in lb.into_iter().chain(rb) {
            self.assume_is_type(&b, &Type::Int, ctx);
        }
        self.lia_store.push(LiaAtom { lhs, rhs, strict });
        if self.lia_absurd() {
            self.absurd = true;
        }
    }

    fn assume_is_type(&mut self, o: &Obj, t: &Type, ctx: &mut Ctx) {
        if self.absurd {
            return;
        }
        // Unfold refinements first: o ∈ {x:τ | ψ} is o ∈ τ and ψ[x ↦ o].
        if let Type::Refine { var, base, prop } = t {
            let unfolded = subst_prop(prop, var, o);
            self.assume_is_type(o, base, ctx);
            self.assume_inner(&unfolded, ctx);
            return;
        }
        match o {
            Obj::Null => {}
            Obj::Pair(a, b) => self.assume_pair_is_type(a, b, t, ctx),
            Obj::Linear(l) => {
                let bases: Vec<Obj> = l.terms.keys().cloned().collect();
                for b in bases {
                    if int_bases(&b).is_none() {
                        self.absurd = true;
                        return;
                    }
                    self.assume_is_type(&b, &Type::Int, ctx);
                }
                // The object denotes an integer; a type disjoint from Int
                // is uninhabitable for it.
                if no_overlap(&Type::Int, t) {
                    self.absurd = true;
                }
            }
            Obj::Var(_) => {
                self.restrict_entry(o.clone(), t, ctx);
            }
            Obj::Field(_, _) => {
                self.restrict_entry(o.clone(), t, ctx);
                self.update_root(o, Polarity::Pos, t, ctx);
            }
        }
    }

    fn assume_pair_is_type(&mut self, a: &Obj, b: &Obj, t: &Type, ctx: &mut Ctx) {
        match t {
            Type::Top => {
                self.assume_is_type(a, &Type::Top, ctx);
                self.assume_is_type(b, &Type::Top, ctx);
            }
            Type::Pair(ta, tb) => {
                self.assume_is_type(a, ta, ctx);
                self.assume_is_type(b, tb, ctx);
            }
            Type::Union(ms) => {
                let pair_top = Type::pair(Type::Top, Type::Top);
                let viable: Vec<&Type> = ms.iter().filter(|m| overlap(m, &pair_top)).collect();
                match viable.len() {
                    0 => self.absurd = true,
                    1 => {
                        let m = viable[0].clone();
                        self.assume_is_type(&Obj::pair(a.clone(), b.clone()), &m, ctx);
                    }
                    _ => {
                        let o = Obj::pair(a.clone(), b.clone());
                        self.assume_is_type(a, &Type::Top, ctx);
                        self.assume_is_type(b, &Type::Top, ctx);
                        let cases = viable
                            .into_iter()
                            .map(|m| Prop::is_type(o.clone(), m.clone()))
                            .reduce(Prop::or)
                            .unwrap_or(Prop::TT);
                        self.worklist.push(cases);
                    }
                }
            }
            // A pair value inhabits no base type other than pair shapes.
            Type::Int | Type::True | Type::False | Type::Vec | Type::Fun { .. } => {
                self.absurd = true;
            }
            Type::Refine { .. } => unreachable!("refinements unfold before dispatch"),
        }
    }

    fn assume_not_type(&mut self, o: &Obj, t: &Type, ctx: &mut Ctx) {
        if self.absurd {
            return;
        }
        match o {
            Obj::Null => {}
            Obj::Pair(a, b) => {
                // Satisfaction still requires the components to denote.
                self.assume_is_type(a, &Type::Top, ctx);
                self.assume_is_type(b, &Type::Top, ctx);
                match t {
                    Type::Top => self.absurd = true,
                    Type::Pair(ta, tb) => {
                        let case = Prop::or(
                            Prop::not_type((**a).clone(), (**ta).clone()),
                            Prop::not_type((**b).clone(), (**tb).clone()),
                        );
                        self.assume_inner(&case, ctx);
                    }
                    Type::Union(ms) => {
                        for m in ms.clone() {
                            self.assume_not_type(o, &m, ctx);
                        }
                    }
                    Type::Refine { .. } => {
                        self.entry_mut(o.clone()).negatives.push(t.clone());
                    }
                    // Trivially true: a pair is never one of these.
                    Type::Int | Type::True | Type::False | Type::Vec | Type::Fun { .. } => {}
                }
            }
            Obj::Linear(l) => {
                let bases: Vec<Obj> = l.terms.keys().cloned().collect();
                for b in bases {
                    if int_bases(&b).is_none() {
                        self.absurd = true;
                        return;
                    }
                    self.assume_is_type(&b, &Type::Int, ctx);
                }
                if subtype_with_ctx(self, &Type::Int, t, ctx) {
                    // The object denotes an integer and Int <: t, so the
                    // negation cannot be satisfied.
                    self.absurd = true;
                } else if overlap(&Type::Int, t) {
                    self.entry_mut(o.clone()).negatives.push(t.clone());
                }
            }
            Obj::Var(_) => {
                self.remove_entry(o.clone(), t, ctx);
            }
            Obj::Field(_, _) => {
                self.remove_entry(o.clone(), t, ctx);
                self.update_root(o, Polarity::Neg, t, ctx);
            }
        }
    }

    /// Restrict the positive type recorded directly under `key`.
    fn restrict_entry(&mut self, key: Obj, t: &Type, ctx: &mut Ctx) {
        let old = self.entry_mut(key.clone()).positive_or_top();
        let refined = restrict_with_ctx(self, &old, t, ctx);
        if refined.is_bottom() || self.conflicts_with_negatives(&key, &refined, ctx) {
            self.absurd = true;
        }
        self.entry_mut(key).positive = Some(refined);
    }

    /// Remove from the positive type recorded directly under `key` and
    /// record the negation.
    fn remove_entry(&mut self, key: Obj, t: &Type, ctx: &mut Ctx) {
        let old = self.entry_mut(key.clone()).positive_or_top();
        let refined = remove_with_ctx(self, &old, t, ctx);
        if refined.is_bottom() {
            self.absurd = true;
        }
        let entry = self.entry_mut(key);
        entry.positive = Some(refined);
        entry.negatives.push(t.clone());
    }

    /// A positive type below one of the recorded negations is
    /// unsatisfiable for this object.
    fn conflicts_with_negatives(&self, key: &Obj, positive: &Type, ctx: &mut Ctx) -> bool {
        let Some(entry) = self.type_map.get(key) else {
            return false;
        };
        entry
            .negatives
            .iter()
            .any(|neg| subtype_with_ctx(self, positive, neg, ctx))
    }

    /// Apply the update metafunction along a field path to the root object
    /// of `o`. Roots that can never support the path make the atom
    /// unsatisfiable.
    fn update_root(&mut self, o: &Obj, pol: Polarity, t: &Type, ctx: &mut Ctx) {
        let (root, path) = split_path(o);
        match root {
            Obj::Var(_) => {
                let old = self.entry_mut(root.clone()).positive_or_top();
                let updated = update_with_ctx(self, &old, pol, &path, t, ctx);
                let became_bottom = updated.is_bottom();
                self.entry_mut(root).positive = Some(updated);
                if became_bottom {
                    self.absurd = true;
                }
            }
            // (len ⟨a,b⟩) or a field of an integer-valued object never
            // denotes, so the atom has no models.
            Obj::Pair(_, _) | Obj::Linear(_) => self.absurd = true,
            Obj::Null | Obj::Field(_, _) => {}
        }
    }

    fn entry_mut(&mut self, key: Obj) -> &mut TypeEntry {
        self.type_map.entry(key).or_default()
    }

    /// Merge two alias classes, rewriting stored facts to the surviving
    /// representative. Representatives prefer the most concrete member:
    /// constants, then structural objects, then variables, tie-broken by
    /// the derived object order.
    fn union(&mut self, a: Obj, b: Obj, ctx: &mut Ctx) {
        fn rep_rank(o: &Obj) -> u8 {
            match o {
                Obj::Linear(l) if l.is_constant() => 0,
                Obj::Pair(_, _) => 1,
                Obj::Field(_, _) => 2,
                Obj::Linear(_) => 3,
                Obj::Var(_) => 4,
                Obj::Null => 5,
            }
        }
        let (rep, other) = if (rep_rank(&a), &a) <= (rep_rank(&b), &b) {
            (a.clone(), b)
        } else {
            (b.clone(), a)
        };
        let snapshot = self.clone();
        self.parents.insert(other, rep);
        // Re-key the type map under the new canonical forms, merging
        // entries that collapse together.
        let old_map = std::mem::take(&mut self.type_map);
        for (key, entry) in old_map {
            let key = self.canon(&key);
            match self.type_map.get_mut(&key) {
                None => {
                    self.type_map.insert(key, entry);
                }
                Some(existing) => {
                    let merged = match (existing.positive.clone(), entry.positive) {
                        (Some(p), Some(q)) => Some(restrict_with_ctx(&snapshot, &p, &q, ctx)),
                        (p, q) => p.or(q),
                    };
                    existing.positive = merged;
                    existing.negatives.extend(entry.negatives);
                }
            }
        }
        if self
            .type_map
            .values()
            .any(|e| e.positive.as_ref().is_some_and(Type::is_bottom))
        {
            self.absurd = true;
        }
        let rekeyed: Vec<Obj> = self.type_map.keys().cloned().collect();
        for key in rekeyed {
            let positive = self
                .type_map
                .get(&key)
                .map(TypeEntry::positive_or_top)
                .unwrap_or(Type::Top);
            if self.conflicts_with_negatives(&key, &positive, ctx) {
                self.absurd = true;
            }
            // What the key's own shape says it must denote.
            let intrinsic = match &key {
                Obj::Linear(_) => Some(Type::Int),
                Obj::Pair(_, _) => Some(Type::pair(Type::Top, Type::Top)),
                _ => None,
            };
            if let Some(it) = intrinsic {
                if no_overlap(&positive, &it) {
                    self.absurd = true;
                }
            }
            // A field path rooted in an integer-valued or pair object can
            // never denote.
            if matches!(&key, Obj::Field(_, _)) {
                let (root, _) = split_path(&key);
                if matches!(root, Obj::Pair(_, _) | Obj::Linear(_)) {
                    self.absurd = true;
                }
            }
        }
        let old_atoms = std::mem::take(&mut self.lia_store);
        self.lia_store = old_atoms
            .into_iter()
            .map(|atom| LiaAtom {
                lhs: self.canon(&atom.lhs),
                rhs: self.canon(&atom.rhs),
                strict: atom.strict,
            })
            .collect();
        if self.lia_absurd() {
            self.absurd = true;
        }
    }

    // ------------------------------------------------------------------
    // theory translation
    // ------------------------------------------------------------------

    fn lia_system(&self, ids: &mut BTreeMap<Obj, usize>) -> ConstraintSys {
        let mut sys = ConstraintSys::default();
        for atom in &self.lia_store {
            let lhs = self.obj_linexpr(&atom.lhs, ids);
            let rhs = self.obj_linexpr(&atom.rhs, ids);
            if let (Some(l), Some(r)) = (lhs, rhs) {
                let rel = if atom.strict { Rel::Lt } else { Rel::Le };
                sys.push(Constraint::new(l.add(&r.negated()), rel));
            }
        }
        sys
    }

    fn obj_linexpr(&self, o: &Obj, ids: &mut BTreeMap<Obj, usize>) -> Option<LinExpr> {
        fn id_of(ids: &mut BTreeMap<Obj, usize>, o: &Obj) -> usize {
            let next = ids.len();
            *ids.entry(o.clone()).or_insert(next)
        }
        match o {
            Obj::Var(_) | Obj::Field(_, _) => Some(LinExpr::atom(id_of(ids, o))),
            Obj::Linear(l) => {
                let mut e = LinExpr::constant(l.constant.clone());
                for (base, coeff) in &l.terms {
                    match base {
                        Obj::Var(_) | Obj::Field(_, _) => {
                            e.add_term(id_of(ids, base), coeff.clone())
                        }
                        _ => return None,
                    }
                }
                Some(e)
            }
            Obj::Null | Obj::Pair(_, _) => None,
        }
    }

    fn lia_absurd(&self) -> bool {
        let mut ids = BTreeMap::new();
        lia::unsat_with_guard(&self.lia_system(&mut ids), self.config.fm_size_guard)
    }

    fn lia_entails(&self, lhs: &Obj, rhs: &Obj, strict: bool) -> bool {
        let mut ids = BTreeMap::new();
        let sys = self.lia_system(&mut ids);
        let (Some(l), Some(r)) = (
            self.obj_linexpr(lhs, &mut ids),
            self.obj_linexpr(rhs, &mut ids),
        ) else {
            return false;
        };
        let rel = if strict { Rel::Lt } else { Rel::Le };
        let goal = Constraint::new(l.add(&r.negated()), rel);
        lia::entails_with_guard(&sys, &goal, self.config.fm_size_guard)
    }

    // ------------------------------------------------------------------
    // lookup
    // ------------------------------------------------------------------

    pub(crate) fn lookup_pos(&self, o: &Obj, ctx: &mut Ctx) -> Option<Type> {
        match o {
            Obj::Null => None,
            Obj::Var(_) => Some(
                self.type_map
                    .get(o)
                    .map(TypeEntry::positive_or_top)
                    .unwrap_or(Type::Top),
            ),
            Obj::Pair(a, b) => {
                let pa = self.lookup_pos(a, ctx)?;
                let pb = self.lookup_pos(b, ctx)?;
                let structural = Type::pair(pa, pb);
                match self.type_map.get(o) {
                    Some(entry) => Some(restrict_with_ctx(
                        self,
                        &entry.positive_or_top(),
                        &structural,
                        ctx,
                    )),
                    None => Some(structural),
                }
            }
            Obj::Field(f, base) => {
                let entry = self.type_map.get(o).map(TypeEntry::positive_or_top);
                let structural = self
                    .lookup_pos(base, ctx)
                    .and_then(|bt| component_type(*f, &bt));
                match (entry, structural) {
                    (None, None) => None,
                    (Some(e), None) => Some(e),
                    (None, Some(s)) => Some(s),
                    (Some(e), Some(s)) => Some(restrict_with_ctx(self, &e, &s, ctx)),
                }
            }
            Obj::Linear(l) => {
                for base in l.terms.keys() {
                    let p = self.lookup_pos(base, ctx)?;
                    if !subtype_with_ctx(self, &p, &Type::Int, ctx) {
                        return None;
                    }
                }
                Some(Type::Int)
            }
        }
    }

    // ------------------------------------------------------------------
    // proves
    // ------------------------------------------------------------------

    pub(crate) fn proves_inner(&self, goal: &Prop, ctx: &mut Ctx) -> bool {
        if self.absurd {
            return true;
        }
        let Some(mut inner) = ctx.descend() else {
            return false;
        };
        let direct = match goal {
            Prop::TT => true,
            Prop::FF => false,
            Prop::And(a, b) => {
                self.proves_inner(a, &mut inner) && self.proves_inner(b, &mut inner)
            }
            Prop::Or(a, b) => {
                self.proves_inner(a, &mut inner) || self.proves_inner(b, &mut inner)
            }
            Prop::IsType(o, t) => {
                let o = self.canon(o);
                self.goal_is_type(&o, t, &mut inner)
            }
            Prop::NotType(o, t) => {
                let o = self.canon(o);
                self.goal_not_type(&o, t, &mut inner)
            }
            Prop::Alias(a, b) => self.goal_alias(&self.canon(a), &self.canon(b), &mut inner),
            Prop::Leq(a, b) => self.goal_lia(&self.canon(a), &self.canon(b), false, &mut inner),
            Prop::Lt(a, b) => self.goal_lia(&self.canon(a), &self.canon(b), true, &mut inner),
        };
        ctx.fresh = inner.fresh;
        if direct {
            return true;
        }
        self.split_worklist(goal, ctx)
    }

    /// Case-split each stored disjunction: the goal holds if, for some
    /// disjunction, every disjunct's extension proves it.
    fn split_worklist(&self, goal: &Prop, ctx: &mut Ctx) -> bool {
        if ctx.splits == 0 {
            return false;
        }
        for i in 0..self.worklist.len() {
            let mut base = self.clone();
            let or = base.worklist.remove(i);
            let disjuncts = flatten_or(&or);
            let mut inner = Ctx {
                splits: ctx.splits - 1,
                ..*ctx
            };
            let all = disjuncts.iter().all(|d| {
                let mut branch = base.clone();
                branch.assume_inner(d, &mut inner);
                branch.proves_inner(goal, &mut inner)
            });
            ctx.fresh = inner.fresh;
            if all {
                return true;
            }
        }
        false
    }

    fn goal_is_type(&self, o: &Obj, t: &Type, ctx: &mut Ctx) -> bool {
        if let Some(pos) = self.lookup_pos(o, ctx) {
            if subtype_with_ctx(self, &pos, t, ctx) {
                return true;
            }
        }
        match t {
            Type::Refine { var, base, prop } => {
                self.goal_is_type(o, base, ctx) && {
                    let instantiated = subst_prop(prop, var, o);
                    self.proves_inner(&instantiated, ctx)
                }
            }
            Type::Union(ms) => ms.iter().any(|m| self.goal_is_type(o, m, ctx)),
            Type::Pair(ta, tb) => match o {
                Obj::Pair(a, b) => {
                    self.goal_is_type(a, ta, ctx) && self.goal_is_type(b, tb, ctx)
                }
                _ => {
                    let pair_shaped = self.lookup_pos(o, ctx).is_some_and(|p| {
                        subtype_with_ctx(self, &p, &Type::pair(Type::Top, Type::Top), ctx)
                    });
                    pair_shaped
                        && self.goal_is_type(&Obj::field(Field::Fst, o.clone()), ta, ctx)
                        && self.goal_is_type(&Obj::field(Field::Snd, o.clone()), tb, ctx)
                }
            },
            _ => false,
        }
    }

    fn goal_not_type(&self, o: &Obj, t: &Type, ctx: &mut Ctx) -> bool {
        // The model relation for o ∉ τ is tag-level non-overlap, which is
        // not upward-closed for refinement or function types: membership in
        // those is not determined by the value's tag. Routes that reason
        // by contradiction are therefore restricted to tag-exact goals.
        let tag_exact = is_tag_exact(t);
        // Recorded negations: o ∉ σ and τ <: σ give o ∉ τ.
        if tag_exact {
            if let Some(entry) = self.type_map.get(o) {
                for neg in &entry.negatives {
                    if subtype_with_ctx(self, t, neg, ctx) {
                        return true;
                    }
                }
            }
        }
        // Non-overlap of the recorded positive type.
        if let Some(pos) = self.lookup_pos(o, ctx) {
            if no_overlap(&pos, t) {
                return true;
            }
        }
        if let (Obj::Pair(a, b), Type::Pair(ta, tb)) = (o, t) {
            let a_out = self.goal_not_type(a, ta, ctx) && self.lookup_pos(b, ctx).is_some();
            if a_out {
                return true;
            }
            let b_out = self.goal_not_type(b, tb, ctx) && self.lookup_pos(a, ctx).is_some();
            if b_out {
                return true;
            }
        }
        // Bounded refutation: assume the opposite and look for absurdity.
        if tag_exact && self.lookup_pos(o, ctx).is_some() {
            let mut trial = self.clone();
            trial.assume_inner(&Prop::is_type(o.clone(), t.clone()), ctx);
            if trial.absurd {
                return true;
            }
        }
        false
    }

    fn goal_alias(&self, a: &Obj, b: &Obj, ctx: &mut Ctx) -> bool {
        if a == b && !a.is_null() {
            return true;
        }
        if let (Obj::Pair(a1, a2), Obj::Pair(b1, b2)) = (a, b) {
            return self.goal_alias(a1, b1, ctx) && self.goal_alias(a2, b2, ctx);
        }
        // Two provably equal integers denote the same value.
        self.goal_lia(a, b, false, ctx) && self.goal_lia(b, a, false, ctx)
    }

    fn goal_lia(&self, lhs: &Obj, rhs: &Obj, strict: bool, ctx: &mut Ctx) -> bool {
        let (Some(lb), Some(rb)) = (int_bases(lhs), int_bases(rhs)) else {
            return false;
        };
        for base in lb.iter().chain(rb.iter()) {
            let Some(p) = self.lookup_pos(base, ctx) else {
                return false;
            };
            if !subtype_with_ctx(self, &p, &Type::Int, ctx) {
                return false;
            }
        }
        self.lia_entails(lhs, rhs, strict)
    }
}

/// Membership in a tag-exact type is fully determined by a value's tag
/// structure, so tag overlap coincides with inhabitation.
fn is_tag_exact(t: &Type) -> bool {
    match t {
        Type::Top | Type::Int | Type::True | Type::False | Type::Vec => true,
        Type::Pair(a, b) => is_tag_exact(a) && is_tag_exact(b),
        Type::Union(ms) => ms.iter().all(is_tag_exact),
        Type::Fun { .. } | Type::Refine { .. } => false,
    }
}

/// The non-linear bases an object's integer denotation depends on, or
/// `None` if the object can never denote an integer.
fn int_bases(o: &Obj) -> Option<Vec<Obj>> {
    match o {
        Obj::Var(_) | Obj::Field(_, _) => Some(vec![o.clone()]),
        Obj::Linear(l) => {
            let mut out = Vec::new();
            for base in l.terms.keys() {
                match base {
                    Obj::Var(_) | Obj::Field(_, _) => out.push(base.clone()),
                    _ => return None,
                }
            }
            Some(out)
        }
        Obj::Null | Obj::Pair(_, _) => None,
    }
}

/// Split a field path into its root object and the fields applied to it,
/// innermost first.
fn split_path(o: &Obj) -> (Obj, Vec<Field>) {
    match o {
        Obj::Field(f, base) => {
            let (root, mut path) = split_path(base);
            path.push(*f);
            (root, path)
        }
        other => (other.clone(), Vec::new()),
    }
}

fn flatten_or(p: &Prop) -> Vec<Prop> {
    match p {
        Prop::Or(a, b) => {
            let mut out = flatten_or(a);
            out.extend(flatten_or(b));
            out
        }
        other => vec![other.clone()],
    }
}

/// The type of a field projection given the base object's type, when the
/// base type guarantees the projection denotes.
fn component_type(f: Field, base: &Type) -> Option<Type> {
    match (f, base) {
        (Field::Fst, Type::Pair(a, _)) => Some((**a).clone()),
        (Field::Snd, Type::Pair(_, b)) => Some((**b).clone()),
        (Field::Len, Type::Vec) => Some(Type::Int),
        (f, Type::Refine { base, .. }) => component_type(f, base),
        (f, Type::Union(ms)) if !ms.is_empty() => {
            let mut parts = Vec::new();
            for m in ms {
                parts.push(component_type(f, m)?);
            }
            Some(Type::union(parts))
        }
        _ => None,
    }
}

// ----------------------------------------------------------------------
// update metafunction
// ----------------------------------------------------------------------

/// Conservative syntactic overlap test: disjoint base tags, pair versus
/// non-pair, vector versus non-vector. Refinements overlap whenever their
/// base does.
pub fn overlap(a: &Type, b: &Type) -> bool {
    match (a, b) {
        (Type::Union(ms), other) | (other, Type::Union(ms)) => {
            ms.iter().any(|m| overlap(m, other))
        }
        (Type::Refine { base, .. }, other) | (other, Type::Refine { base, .. }) => {
            overlap(base, other)
        }
        (Type::Top, _) | (_, Type::Top) => true,
        (Type::Int, Type::Int)
        | (Type::True, Type::True)
        | (Type::False, Type::False)
        | (Type::Vec, Type::Vec)
        | (Type::Fun { .. }, Type::Fun { .. }) => true,
        (Type::Pair(a1, a2), Type::Pair(b1, b2)) => overlap(a1, b1) && overlap(a2, b2),
        _ => false,
    }
}

pub fn no_overlap(a: &Type, b: &Type) -> bool {
    !overlap(a, b)
}

/// Refine a type along a field path (innermost field first) with positive
/// or negative information. Paths that do not apply to the type's shape
/// leave it unchanged.
pub fn update(env: &HybridEnv, t: &Type, pol: Polarity, path: &[Field], sigma: &Type) -> Type {
    let mut ctx = Ctx::new(env.config());
    update_with_ctx(env, t, pol, path, sigma, &mut ctx)
}

pub(crate) fn update_with_ctx(
    env: &HybridEnv,
    t: &Type,
    pol: Polarity,
    path: &[Field],
    sigma: &Type,
    ctx: &mut Ctx,
) -> Type {
    if let Type::Union(ms) = t {
        return Type::union(
            ms.iter()
                .map(|m| update_with_ctx(env, m, pol, path, sigma, ctx))
                .collect(),
        );
    }
    let Some((first, rest)) = path.split_first() else {
        return match pol {
            Polarity::Pos => restrict_with_ctx(env, t, sigma, ctx),
            Polarity::Neg => remove_with_ctx(env, t, sigma, ctx),
        };
    };
    if let Type::Refine { var, base, prop } = t {
        let updated = update_with_ctx(env, base, pol, path, sigma, ctx);
        return Type::refine(var.clone(), updated, prop.clone());
    }
    match (first, t) {
        (Field::Fst, Type::Pair(a, b)) => Type::pair(
            update_with_ctx(env, a, pol, rest, sigma, ctx),
            (**b).clone(),
        ),
        (Field::Snd, Type::Pair(a, b)) => Type::pair(
            (**a).clone(),
            update_with_ctx(env, b, pol, rest, sigma, ctx),
        ),
        // Vector lengths live in the theory store, not in the type.
        (Field::Len, Type::Vec) => Type::Vec,
        _ => t.clone(),
    }
}

/// Approximate intersection per the update metafunction's restrict.
pub fn restrict(env: &HybridEnv, t: &Type, sigma: &Type) -> Type {
    let mut ctx = Ctx::new(env.config());
    restrict_with_ctx(env, t, sigma, &mut ctx)
}

pub(crate) fn restrict_with_ctx(env: &HybridEnv, t: &Type, sigma: &Type, ctx: &mut Ctx) -> Type {
    if no_overlap(t, sigma) {
        return Type::bottom();
    }
    if let Type::Union(ms) = t {
        return Type::union(
            ms.iter()
                .map(|m| restrict_with_ctx(env, m, sigma, ctx))
                .collect(),
        );
    }
    if let Type::Refine { var, base, prop } = t {
        return Type::refine(
            var.clone(),
            restrict_with_ctx(env, base, sigma, ctx),
            prop.clone(),
        );
    }
    if subtype_with_ctx(env, t, sigma, ctx) {
        return t.clone();
    }
    sigma.clone()
}

/// Approximate difference per the update metafunction's remove.
pub fn remove(env: &HybridEnv, t: &Type, sigma: &Type) -> Type {
    let mut ctx = Ctx::new(env.config());
    remove_with_ctx(env, t, sigma, &mut ctx)
}

pub(crate) fn remove_with_ctx(env: &HybridEnv, t: &Type, sigma: &Type, ctx: &mut Ctx) -> Type {
    if subtype_with_ctx(env, t, sigma, ctx) {
        return Type::bottom();
    }
    if let Type::Union(ms) = t {
        return Type::union(
            ms.iter()
                .map(|m| remove_with_ctx(env, m, sigma, ctx))
                .collect(),
        );
    }
    if let Type::Refine { var, base, prop } = t {
        return Type::refine(
            var.clone(),
            remove_with_ctx(env, base, sigma, ctx),
            prop.clone(),
        );
    }
    t.clone()
}

/// Build an environment from a sequence of propositions.
pub fn env_from_props(config: Config, props: &[Prop]) -> HybridEnv {
    let mut env = HybridEnv::new(config);
    let mut ctx = Ctx::new(env.config());
    for p in props {
        env.assume_inner(p, &mut ctx);
    }
    env
}

/// Push facts equating an object with a concrete integer: an alias plus
/// the two inequalities that make the equality visible to the theory.
pub fn int_equality_props(o: &Obj, n: &BigInt) -> Vec<Prop> {
    vec![
        Prop::alias(o.clone(), Obj::int(n.clone())),
        Prop::leq(o.clone(), Obj::int(n.clone())),
        Prop::leq(Obj::int(n.clone()), o.clone()),
    ]
}
