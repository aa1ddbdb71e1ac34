//! Seeded random structures, teams and formulas at desk scale.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::scalar::Rational;
use crate::structure::{Elem, Structure, TupleIter};
use crate::syntax::ast::{Condition, Formula, Term, Var};
use crate::team::WeightedTeam;

pub const VAR_POOL: [&str; 4] = ["x", "y", "z", "w"];

/// Domain `e0 …`, a unary `R` and binary `S` with random tables, and
/// constants `zero`, `one` (equal when the domain has one element).
pub fn structure(rng: &mut impl Rng, n: usize) -> Structure {
    let mut st = Structure::with_size(n.max(1)).expect("nonempty domain");
    let r: Vec<Vec<Elem>> = (0..n)
        .filter(|_| rng.gen_bool(0.5))
        .map(|a| vec![a])
        .collect();
    let s: Vec<Vec<Elem>> = TupleIter::new(n, 2).filter(|_| rng.gen_bool(0.4)).collect();
    st.add_relation_indices("R", 1, r).expect("valid table");
    st.add_relation_indices("S", 2, s).expect("valid table");
    if n == 1 {
        st.set_constant("zero", "e0").expect("e0 exists");
        st.set_constant("one", "e0").expect("e0 exists");
    }
    st
}

/// Normalized team with at most `max_rows` support rows and a common
/// denominator of at most `max_den`.
pub fn team(
    rng: &mut impl Rng,
    st: &Structure,
    vars: &[Var],
    max_rows: usize,
    max_den: u64,
) -> WeightedTeam {
    let mut all: Vec<Vec<Elem>> = st.tuples(vars.len()).collect();
    all.shuffle(rng);
    let cap = all.len().min(max_rows.max(1)).min(max_den.max(1) as usize);
    let rows = rng.gen_range(1..=cap);
    let den = rng.gen_range(rows as u64..=max_den.max(rows as u64));
    let mut units = vec![1u64; rows];
    for _ in rows as u64..den {
        units[rng.gen_range(0..rows)] += 1;
    }
    let weighted = all
        .into_iter()
        .take(rows)
        .zip(units)
        .map(|(t, u)| (t, ratio(u, den)));
    WeightedTeam::from_rows(vars.iter().cloned(), weighted).expect("distinct tuples")
}

/// Team with a single support row of weight 1.
pub fn singleton_team(rng: &mut impl Rng, st: &Structure, vars: &[Var]) -> WeightedTeam {
    let t: Vec<Elem> = vars.iter().map(|_| rng.gen_range(0..st.size())).collect();
    WeightedTeam::from_rows(vars.iter().cloned(), [(t, ratio(1, 1))]).expect("one row")
}

pub fn ratio(n: u64, d: u64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn term(rng: &mut impl Rng, scope: &[Var]) -> Term {
    if scope.is_empty() {
        Term::Const(if rng.gen_bool(0.5) { "zero" } else { "one" }.into())
    } else {
        Term::Var(scope.choose(rng).expect("nonempty").clone())
    }
}

fn literal_parts(
    rng: &mut impl Rng,
    scope: &[Var],
) -> (Option<(String, Vec<Term>)>, Option<(Term, Term)>, bool) {
    let negated = rng.gen_bool(0.3);
    match rng.gen_range(0..3) {
        0 => (Some(("R".into(), vec![term(rng, scope)])), None, negated),
        1 => (
            Some(("S".into(), vec![term(rng, scope), term(rng, scope)])),
            None,
            negated,
        ),
        _ => (None, Some((term(rng, scope), term(rng, scope))), negated),
    }
}

pub fn literal(rng: &mut impl Rng, scope: &[Var]) -> Formula {
    match literal_parts(rng, scope) {
        (Some((name, args)), _, negated) => Formula::Rel {
            name,
            args,
            negated,
        },
        (_, Some((left, right)), negated) => Formula::Eq {
            left,
            right,
            negated,
        },
        _ => unreachable!(),
    }
}

pub fn condition(rng: &mut impl Rng, scope: &[Var], depth: usize) -> Condition {
    if depth <= 1 || rng.gen_bool(0.5) {
        return match literal_parts(rng, scope) {
            (Some((name, args)), _, negated) => Condition::Rel {
                name,
                args,
                negated,
            },
            (_, Some((left, right)), negated) => Condition::Eq {
                left,
                right,
                negated,
            },
            _ => unreachable!(),
        };
    }
    if rng.gen_bool(0.3) {
        Condition::not(condition(rng, scope, depth - 1))
    } else {
        Condition::and(
            condition(rng, scope, depth - 1),
            condition(rng, scope, depth - 1),
        )
    }
}

fn bind(rng: &mut impl Rng, scope: &[Var]) -> (Var, Vec<Var>) {
    let v = VAR_POOL.choose(rng).expect("nonempty").to_string();
    let mut inner = scope.to_vec();
    if !inner.contains(&v) {
        inner.push(v.clone());
    }
    (v, inner)
}

/// Classical first-order formula with free variables among `scope`.
pub fn fo_formula(rng: &mut impl Rng, scope: &[Var], depth: usize) -> Formula {
    if depth <= 1 || rng.gen_bool(0.25) {
        return literal(rng, scope);
    }
    match rng.gen_range(0..4) {
        0 => Formula::and(
            fo_formula(rng, scope, depth - 1),
            fo_formula(rng, scope, depth - 1),
        ),
        1 => Formula::split_or(
            fo_formula(rng, scope, depth - 1),
            fo_formula(rng, scope, depth - 1),
        ),
        k => {
            let (v, inner) = bind(rng, scope);
            let body = Box::new(fo_formula(rng, &inner, depth - 1));
            if k == 2 {
                Formula::Exists(v, body)
            } else {
                Formula::Forall(v, body)
            }
        }
    }
}

/// FOPT formula with free variables among `scope`.
pub fn fopt_formula(rng: &mut impl Rng, scope: &[Var], depth: usize) -> Formula {
    if depth <= 1 || rng.gen_bool(0.25) {
        if rng.gen_bool(0.3) {
            return literal(rng, scope);
        }
        let d = depth.clamp(1, 2);
        return Formula::cmp(
            condition(rng, scope, d),
            condition(rng, scope, d),
            condition(rng, scope, d),
            condition(rng, scope, d),
        );
    }
    match rng.gen_range(0..5) {
        0 => Formula::dot_neg(fopt_formula(rng, scope, depth - 1)),
        1 => Formula::and(
            fopt_formula(rng, scope, depth - 1),
            fopt_formula(rng, scope, depth - 1),
        ),
        2 => Formula::global_or(
            fopt_formula(rng, scope, depth - 1),
            fopt_formula(rng, scope, depth - 1),
        ),
        k => {
            let (v, inner) = bind(rng, scope);
            let body = Box::new(fopt_formula(rng, &inner, depth - 1));
            if k == 3 {
                Formula::Exists1(v, body)
            } else {
                Formula::Forall1(v, body)
            }
        }
    }
}

/// Which constructs [`team_formula`] may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TeamShape {
    pub indep: bool,
    pub dep: bool,
    pub marg: bool,
    pub entropy: bool,
    pub bool_neg: bool,
    pub quantifiers: bool,
}

impl Default for TeamShape {
    fn default() -> Self {
        Self {
            indep: true,
            dep: true,
            marg: true,
            entropy: false,
            bool_neg: false,
            quantifiers: true,
        }
    }
}

fn var_tuple(rng: &mut impl Rng, scope: &[Var], min: usize) -> Vec<Var> {
    let len = rng.gen_range(min..=2.min(scope.len()).max(min));
    (0..len)
        .map(|_| scope.choose(rng).expect("nonempty").clone())
        .collect()
}

pub fn team_atom(rng: &mut impl Rng, scope: &[Var], shape: &TeamShape) -> Formula {
    let mut kinds = Vec::new();
    if shape.indep {
        kinds.push(0);
    }
    if shape.dep {
        kinds.push(1);
    }
    if shape.marg {
        kinds.push(2);
    }
    if shape.entropy {
        kinds.push(3);
    }
    if scope.is_empty() || kinds.is_empty() {
        return literal(rng, scope);
    }
    match *kinds.choose(rng).expect("nonempty") {
        0 => Formula::Indep {
            cond: var_tuple(rng, scope, 0),
            left: var_tuple(rng, scope, 1),
            right: var_tuple(rng, scope, 1),
        },
        1 => Formula::Dep {
            lhs: var_tuple(rng, scope, 0),
            rhs: var_tuple(rng, scope, 1),
        },
        2 => {
            let lhs = var_tuple(rng, scope, 1);
            let rhs = (0..lhs.len())
                .map(|_| scope.choose(rng).expect("nonempty").clone())
                .collect();
            Formula::Marg { lhs, rhs }
        }
        _ => Formula::Entropy {
            lhs: var_tuple(rng, scope, 1),
            rhs: var_tuple(rng, scope, 1),
        },
    }
}

/// Team-semantics formula with free variables among `scope`.
pub fn team_formula(rng: &mut impl Rng, scope: &[Var], depth: usize, shape: &TeamShape) -> Formula {
    if depth <= 1 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.5) {
            literal(rng, scope)
        } else {
            team_atom(rng, scope, shape)
        };
    }
    let choices = if shape.quantifiers { 5 } else { 3 };
    match rng.gen_range(0..choices) {
        0 if shape.bool_neg => Formula::bool_neg(team_formula(rng, scope, depth - 1, shape)),
        0 | 1 => Formula::and(
            team_formula(rng, scope, depth - 1, shape),
            team_formula(rng, scope, depth - 1, shape),
        ),
        2 => Formula::split_or(
            team_formula(rng, scope, depth - 1, shape),
            team_formula(rng, scope, depth - 1, shape),
        ),
        k => {
            let (v, inner) = bind(rng, scope);
            let body = Box::new(team_formula(rng, &inner, depth - 1, shape));
            if k == 3 {
                Formula::Exists(v, body)
            } else {
                Formula::Forall(v, body)
            }
        }
    }
}

/// The first `n` variables of [`VAR_POOL`].
pub fn scope_vars(n: usize) -> Vec<Var> {
    VAR_POOL.iter().take(n).map(|s| s.to_string()).collect()
}
