use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::syntax::ast::{Condition, Formula, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dialect {
    /// Classical first-order: literals, `&`, `\/`, `exists`, `forall`.
    Fo,
    /// Adds team atoms (independence, dependence, marginal identity, entropy).
    FoAtoms,
    /// Adds Boolean negation `~`.
    FoAtomsNeg,
    /// Conditional comparison atoms with `not`, `||`, `E1`, `A1`.
    Fopt,
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dialect::Fo => "FO",
            Dialect::FoAtoms => "FO_ATOMS",
            Dialect::FoAtomsNeg => "FO_ATOMS_NEG",
            Dialect::Fopt => "FOPT",
        })
    }
}

#[derive(Default)]
struct Usage {
    fopt_only: bool,
    team_only: bool,
    atoms: bool,
    neg: bool,
}

fn scan(f: &Formula, u: &mut Usage) {
    match f {
        Formula::Cmp(_)
        | Formula::DotNeg(_)
        | Formula::GlobalOr(..)
        | Formula::Exists1(..)
        | Formula::Forall1(..) => u.fopt_only = true,
        Formula::Indep { .. }
        | Formula::Dep { .. }
        | Formula::Marg { .. }
        | Formula::Entropy { .. } => {
            u.team_only = true;
            u.atoms = true;
        }
        Formula::BoolNeg(_) => {
            u.team_only = true;
            u.neg = true;
        }
        Formula::SplitOr(..) | Formula::Exists(..) | Formula::Forall(..) => u.team_only = true,
        Formula::Rel { .. } | Formula::Eq { .. } | Formula::And(..) => {}
    }
    for c in f.children() {
        scan(c, u);
    }
}

/// The least dialect admitting `f`.
pub fn dialect_of(f: &Formula) -> Result<Dialect> {
    let mut u = Usage::default();
    scan(f, &mut u);
    Ok(match (u.fopt_only, u.team_only) {
        (true, true) => return Err(Error::MixedDialect),
        (true, false) => Dialect::Fopt,
        _ if u.neg => Dialect::FoAtomsNeg,
        _ if u.atoms => Dialect::FoAtoms,
        _ => Dialect::Fo,
    })
}

/// Formula built from literals and `&` only: admissible in every dialect.
pub fn is_quantifier_free_conjunction(f: &Formula) -> bool {
    match f {
        Formula::Rel { .. } | Formula::Eq { .. } => true,
        Formula::And(a, b) => {
            is_quantifier_free_conjunction(a) && is_quantifier_free_conjunction(b)
        }
        _ => false,
    }
}

fn condition_vars(c: &Condition) -> BTreeSet<Var> {
    let mut v = Vec::new();
    c.collect_vars(&mut v);
    v.into_iter().collect()
}

pub fn free_vars(f: &Formula) -> BTreeSet<Var> {
    match f {
        Formula::Rel { args, .. } => args
            .iter()
            .filter_map(|t| t.as_var().map(String::from))
            .collect(),
        Formula::Eq { left, right, .. } => [left, right]
            .iter()
            .filter_map(|t| t.as_var().map(String::from))
            .collect(),
        Formula::Indep { cond, left, right } => {
            cond.iter().chain(left).chain(right).cloned().collect()
        }
        Formula::Dep { lhs, rhs } | Formula::Marg { lhs, rhs } | Formula::Entropy { lhs, rhs } => {
            lhs.iter().chain(rhs).cloned().collect()
        }
        Formula::Cmp(cs) => cs.iter().flat_map(condition_vars).collect(),
        Formula::BoolNeg(c) | Formula::DotNeg(c) => free_vars(c),
        Formula::And(a, b) | Formula::SplitOr(a, b) | Formula::GlobalOr(a, b) => {
            let mut s = free_vars(a);
            s.extend(free_vars(b));
            s
        }
        Formula::Exists(v, b)
        | Formula::Forall(v, b)
        | Formula::Exists1(v, b)
        | Formula::Forall1(v, b) => {
            let mut s = free_vars(b);
            s.remove(v);
            s
        }
    }
}

/// Error unless `f` is a sentence.
pub fn require_sentence(f: &Formula) -> Result<()> {
    let fv = free_vars(f);
    if fv.is_empty() {
        Ok(())
    } else {
        Err(Error::OpenFormula(fv.into_iter().collect()))
    }
}

/// Whether evaluation of `f` needs a witness search (split disjunction or
/// probabilistic existential quantifier).
pub fn needs_search(f: &Formula) -> bool {
    f.any(&|g| matches!(g, Formula::SplitOr(..) | Formula::Exists(..)))
}
