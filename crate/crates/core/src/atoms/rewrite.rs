//! Rewrites between atoms.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::syntax::ast::{fresh_var, Formula, Term, Var};

fn map_atoms(f: &Formula, g: &mut impl FnMut(&Formula) -> Result<Formula>) -> Result<Formula> {
    if f.is_atom() {
        return g(f);
    }
    let mut err = None;
    let out = f.map_children(&mut |c| match map_atoms(c, g) {
        Ok(x) => x,
        Err(e) => {
            err.get_or_insert(e);
            c.clone()
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// `dep(x ; y)` becomes `indep(x ; y ; y)`.
pub fn rewrite_dep_to_indep(f: &Formula) -> Formula {
    map_atoms(f, &mut |a| {
        Ok(match a {
            Formula::Dep { lhs, rhs } => Formula::Indep {
                cond: lhs.clone(),
                left: rhs.clone(),
                right: rhs.clone(),
            },
            other => other.clone(),
        })
    })
    .expect("infallible")
}

/// `dep(x ; y)` becomes `entropy(x ; x y)`.
pub fn rewrite_dep_to_entropy(f: &Formula) -> Formula {
    map_atoms(f, &mut |a| {
        Ok(match a {
            Formula::Dep { lhs, rhs } => Formula::Entropy {
                lhs: lhs.clone(),
                rhs: lhs.iter().chain(rhs).cloned().collect(),
            },
            other => other.clone(),
        })
    })
    .expect("infallible")
}

fn eq_const(v: &str, c: &str, negated: bool) -> Formula {
    Formula::Eq {
        left: Term::var(v),
        right: Term::constant(c),
        negated,
    }
}

/// `ψ → φ` for a literal-conjunction guard: `ψ^¬ ∨ (ψ ∧ φ)` with split disjunction.
fn implies(guard: Formula, negated_guard: Formula, body: Formula) -> Formula {
    Formula::split_or(negated_guard, Formula::and(guard, body))
}

fn deps(lhs: &[Var], rhs: &[Var]) -> Formula {
    Formula::Dep {
        lhs: lhs.to_vec(),
        rhs: rhs.to_vec(),
    }
}

/// The entropy template for `x ⊥⊥ y` with fresh `z`, `u` (length
/// `max(|x|,|y|)`) and `v` (length `|x|+|y|`); dependence atoms are left as is.
pub fn indep_template(x: &[Var], y: &[Var], used: &mut BTreeSet<Var>) -> Formula {
    let mut fresh = |base: &str| {
        let v = fresh_var(base, used);
        used.insert(v.clone());
        v
    };
    let z = fresh("z");
    let u: Vec<Var> = (0..x.len().max(y.len()))
        .map(|i| fresh(&format!("u{}", i + 1)))
        .collect();
    let xy: Vec<Var> = x.iter().chain(y).cloned().collect();
    let v: Vec<Var> = (0..xy.len())
        .map(|i| fresh(&format!("v{}", i + 1)))
        .collect();

    let zero_part =
        Formula::conj([deps(&u, x), deps(x, &u), deps(&v, &xy), deps(&xy, &v)]).expect("nonempty");
    let one_part = Formula::conj(
        [deps(&u, y), deps(y, &u)]
            .into_iter()
            .chain(v.iter().map(|vi| eq_const(vi, "zero", false))),
    )
    .expect("nonempty");
    let uz: Vec<Var> = u.iter().cloned().chain([z.clone()]).collect();
    let vz: Vec<Var> = v.iter().cloned().chain([z.clone()]).collect();
    let body = Formula::conj([
        implies(
            eq_const(&z, "zero", false),
            eq_const(&z, "zero", true),
            zero_part,
        ),
        implies(
            eq_const(&z, "one", false),
            eq_const(&z, "one", true),
            one_part,
        ),
        implies(
            Formula::split_or(eq_const(&z, "zero", false), eq_const(&z, "one", false)),
            Formula::and(eq_const(&z, "zero", true), eq_const(&z, "one", true)),
            Formula::Entropy { lhs: uz, rhs: vz },
        ),
    ])
    .expect("nonempty");
    let inner = u
        .iter()
        .chain(&v)
        .rev()
        .fold(body, |acc, var| Formula::exists(var, acc));
    Formula::forall(&z, inner)
}

/// Replaces every marginal independence atom `indep( ; x ; y)` by the
/// entropy template, then rewrites all dependence atoms into entropy atoms.
/// Conditional independence atoms are rejected.
pub fn rewrite_indep_to_entropy(f: &Formula) -> Result<Formula> {
    let mut used = f.all_vars();
    let replaced = map_atoms(f, &mut |a| match a {
        Formula::Indep { cond, left, right } => {
            if !cond.is_empty() {
                return Err(Error::ConditionNotEmpty(a.to_string()));
            }
            Ok(indep_template(left, right, &mut used))
        }
        other => Ok(other.clone()),
    })?;
    Ok(rewrite_dep_to_entropy(&replaced))
}
