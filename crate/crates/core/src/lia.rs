//! Linear integer arithmetic solver based on Fourier-Motzkin elimination.
//!
//! Constraints are normalized to `e <= 0` over opaque integer atoms; strict
//! inequalities are tightened to non-strict ones at construction
//! (`e < 0` becomes `e + 1 <= 0`), which is exact over the integers.
//! Elimination projects rationally, so `unsat` answering true is sound for
//! integer systems while integer-only infeasibility may be missed. All
//! arithmetic is arbitrary precision and division-free apart from gcd
//! normalization.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Opaque handle for an integer unknown.
pub type AtomId = usize;

/// A linear expression over atoms plus a constant. No zero coefficients are
/// stored, and iteration order is canonical.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinExpr {
    pub coeffs: BTreeMap<AtomId, BigInt>,
    pub constant: BigInt,
}

impl LinExpr {
    pub fn constant(c: impl Into<BigInt>) -> LinExpr {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: c.into(),
        }
    }

    pub fn atom(a: AtomId) -> LinExpr {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(a, BigInt::from(1));
        LinExpr {
            coeffs,
            constant: BigInt::zero(),
        }
    }

    pub fn add_term(&mut self, a: AtomId, coeff: impl Into<BigInt>) {
        let c = self.coeffs.entry(a).or_insert_with(BigInt::zero);
        *c += coeff.into();
        if c.is_zero() {
            self.coeffs.remove(&a);
        }
    }

    pub fn add(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        for (a, c) in &other.coeffs {
            out.add_term(*a, c.clone());
        }
        out.constant += &other.constant;
        out
    }

    pub fn scaled(&self, k: &BigInt) -> LinExpr {
        if k.is_zero() {
            return LinExpr::default();
        }
        LinExpr {
            coeffs: self.coeffs.iter().map(|(a, c)| (*a, c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn negated(&self) -> LinExpr {
        self.scaled(&BigInt::from(-1))
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Lt,
}

/// A normalized constraint `lhs <= 0`. Strict input relations are
/// pre-tightened; gcd reduction additionally tightens the constant, which
/// is sound over the integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub lhs: LinExpr,
}

impl Constraint {
    pub fn new(mut lhs: LinExpr, rel: Rel) -> Constraint {
        if rel == Rel::Lt {
            lhs.constant += 1;
        }
        let mut c = Constraint { lhs };
        c.gcd_tighten();
        c
    }

    /// Divide through by the gcd of the coefficients, rounding the constant
    /// up: `g*e' + c <= 0` implies `e' + ceil(c/g) <= 0` for integers.
    fn gcd_tighten(&mut self) {
        if self.lhs.coeffs.is_empty() {
            return;
        }
        let mut g = BigInt::zero();
        for c in self.lhs.coeffs.values() {
            g = g.gcd(c);
        }
        if g.is_zero() || g == BigInt::from(1) {
            return;
        }
        for c in self.lhs.coeffs.values_mut() {
            *c = &*c / &g;
        }
        self.lhs.constant = self.lhs.constant.div_ceil(&g);
    }

    /// A constant constraint that no assignment satisfies.
    pub fn is_trivially_false(&self) -> bool {
        self.lhs.is_constant() && self.lhs.constant.is_positive()
    }

    /// A constant constraint that every assignment satisfies.
    pub fn is_trivially_true(&self) -> bool {
        self.lhs.is_constant() && !self.lhs.constant.is_positive()
    }

    /// The integer negation: `not (e <= 0)` is `e >= 1`, i.e. `-e + 1 <= 0`.
    pub fn negated(&self) -> Constraint {
        let mut lhs = self.lhs.negated();
        lhs.constant += 1;
        Constraint::new(lhs, Rel::Le)
    }
}

/// A conjunction of constraints.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSys {
    pub constraints: Vec<Constraint>,
}

impl ConstraintSys {
    pub fn new(constraints: Vec<Constraint>) -> ConstraintSys {
        ConstraintSys { constraints }
    }

    pub fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn atoms(&self) -> Vec<AtomId> {
        let mut ids: Vec<AtomId> = self
            .constraints
            .iter()
            .flat_map(|c| c.lhs.coeffs.keys().copied())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// Default bound on intermediate constraint counts before `unsat` gives up
/// and answers false (unknown).
pub const DEFAULT_SIZE_GUARD: usize = 10_000;

/// Eliminate one atom, pairing every lower bound with every upper bound.
/// Combined constraints are gcd-normalized with a ceiling on the constant,
/// so the projection preserves exactly the integer solution set of the
/// remaining atoms.
pub fn fm_eliminate(sys: &ConstraintSys, atom: AtomId) -> ConstraintSys {
    let mut uppers: Vec<&Constraint> = Vec::new(); // positive coefficient
    let mut lowers: Vec<&Constraint> = Vec::new(); // negative coefficient
    let mut rest: Vec<Constraint> = Vec::new();
    for c in &sys.constraints {
        match c.lhs.coeffs.get(&atom) {
            Some(k) if k.is_positive() => uppers.push(c),
            Some(_) => lowers.push(c),
            None => rest.push(c.clone()),
        }
    }
    for up in &uppers {
        let a = up.lhs.coeffs[&atom].clone();
        for low in &lowers {
            let b = -low.lhs.coeffs[&atom].clone();
            // b*(up) + a*(low) cancels the atom; both multipliers positive.
            let combined = up.lhs.scaled(&b).add(&low.lhs.scaled(&a));
            debug_assert!(!combined.coeffs.contains_key(&atom));
            rest.push(Constraint::new(combined, Rel::Le));
        }
    }
    ConstraintSys::new(rest)
}

fn simplify(sys: &mut ConstraintSys) -> bool {
    let mut contradiction = false;
    sys.constraints.retain(|c| {
        if c.is_trivially_false() {
            contradiction = true;
        }
        !c.is_trivially_true()
    });
    sys.constraints.sort_by(|a, b| {
        (a.lhs.coeffs.len(), &a.lhs.coeffs, &a.lhs.constant).cmp(&(
            b.lhs.coeffs.len(),
            &b.lhs.coeffs,
            &b.lhs.constant,
        ))
    });
    sys.constraints.dedup();
    contradiction
}

/// True implies the system has no integer solution. Atoms are eliminated
/// greedily (fewest occurrences first); if the intermediate constraint
/// count exceeds `size_guard`, answers false.
pub fn unsat_with_guard(sys: &ConstraintSys, size_guard: usize) -> bool {
    let mut cur = sys.clone();
    loop {
        if simplify(&mut cur) {
            return true;
        }
        if cur.constraints.len() > size_guard {
            return false;
        }
        let atoms = cur.atoms();
        let Some(&atom) = atoms.iter().min_by_key(|a| {
            cur.constraints
                .iter()
                .filter(|c| c.lhs.coeffs.contains_key(a))
                .count()
        }) else {
            return false;
        };
        cur = fm_eliminate(&cur, atom);
    }
}

pub fn unsat(sys: &ConstraintSys) -> bool {
    unsat_with_guard(sys, DEFAULT_SIZE_GUARD)
}

/// Theory entailment: the assumptions together with the negated goal are
/// unsatisfiable. Inherits the size guard (unknown answers false).
pub fn entails_with_guard(assumptions: &ConstraintSys, goal: &Constraint, guard: usize) -> bool {
    let mut sys = assumptions.clone();
    sys.push(goal.negated());
    unsat_with_guard(&sys, guard)
}

pub fn entails(assumptions: &ConstraintSys, goal: &Constraint) -> bool {
    entails_with_guard(assumptions, goal, DEFAULT_SIZE_GUARD)
}
