//! Renaming of free and bound variables.

use std::collections::BTreeSet;

use super::ast::{fresh_var, Condition, Formula, Term, Var};

fn term(t: &Term, from: &str, to: &str) -> Term {
    match t {
        Term::Var(v) if v == from => Term::Var(to.to_string()),
        other => other.clone(),
    }
}

fn list(vs: &[Var], from: &str, to: &str) -> Vec<Var> {
    vs.iter()
        .map(|v| if v == from { to.to_string() } else { v.clone() })
        .collect()
}

fn condition(c: &Condition, from: &str, to: &str) -> Condition {
    match c {
        Condition::Rel {
            name,
            args,
            negated,
        } => Condition::Rel {
            name: name.clone(),
            args: args.iter().map(|t| term(t, from, to)).collect(),
            negated: *negated,
        },
        Condition::Eq {
            left,
            right,
            negated,
        } => Condition::Eq {
            left: term(left, from, to),
            right: term(right, from, to),
            negated: *negated,
        },
        Condition::Not(a) => Condition::not(condition(a, from, to)),
        Condition::And(a, b) => Condition::and(condition(a, from, to), condition(b, from, to)),
    }
}

/// Replaces the free occurrences of `from` by `to`. `to` must not be bound
/// anywhere in `f`.
pub fn rename_free(f: &Formula, from: &str, to: &str) -> Formula {
    match f {
        Formula::Rel {
            name,
            args,
            negated,
        } => Formula::Rel {
            name: name.clone(),
            args: args.iter().map(|t| term(t, from, to)).collect(),
            negated: *negated,
        },
        Formula::Eq {
            left,
            right,
            negated,
        } => Formula::Eq {
            left: term(left, from, to),
            right: term(right, from, to),
            negated: *negated,
        },
        Formula::Indep { cond, left, right } => Formula::Indep {
            cond: list(cond, from, to),
            left: list(left, from, to),
            right: list(right, from, to),
        },
        Formula::Dep { lhs, rhs } => Formula::Dep {
            lhs: list(lhs, from, to),
            rhs: list(rhs, from, to),
        },
        Formula::Marg { lhs, rhs } => Formula::Marg {
            lhs: list(lhs, from, to),
            rhs: list(rhs, from, to),
        },
        Formula::Entropy { lhs, rhs } => Formula::Entropy {
            lhs: list(lhs, from, to),
            rhs: list(rhs, from, to),
        },
        Formula::Cmp(cs) => Formula::Cmp(Box::new(cs.clone().map(|c| condition(&c, from, to)))),
        Formula::Exists(v, _)
        | Formula::Forall(v, _)
        | Formula::Exists1(v, _)
        | Formula::Forall1(v, _)
            if v == from =>
        {
            f.clone()
        }
        other => other.map_children(&mut |c| rename_free(c, from, to)),
    }
}

/// Renames bound variables so that no quantifier rebinds a variable of
/// `reserved` or one bound above it. Names already in the formula are
/// avoided too.
pub fn standardize_apart(f: &Formula, reserved: &BTreeSet<Var>) -> Formula {
    let mut used = f.all_vars();
    used.extend(reserved.iter().cloned());
    go(f, &mut reserved.clone(), &mut used)
}

fn go(f: &Formula, scope: &mut BTreeSet<Var>, used: &mut BTreeSet<Var>) -> Formula {
    match f {
        Formula::Exists(v, b)
        | Formula::Forall(v, b)
        | Formula::Exists1(v, b)
        | Formula::Forall1(v, b) => {
            let (name, body) = if scope.contains(v) {
                let fresh = fresh_var(v, used);
                used.insert(fresh.clone());
                let body = rename_free(b, v, &fresh);
                (fresh, body)
            } else {
                (v.clone(), (**b).clone())
            };
            let added = scope.insert(name.clone());
            let body = Box::new(go(&body, scope, used));
            if added {
                scope.remove(&name);
            }
            match f {
                Formula::Exists(..) => Formula::Exists(name, body),
                Formula::Forall(..) => Formula::Forall(name, body),
                Formula::Exists1(..) => Formula::Exists1(name, body),
                _ => Formula::Forall1(name, body),
            }
        }
        other => other.map_children(&mut |c| go(c, scope, used)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::parse;

    #[test]
    fn renames_only_free_occurrences() {
        let f = parse("R(x) & exists x. S(x, y)").unwrap();
        assert_eq!(
            rename_free(&f, "x", "z").to_string(),
            "R(z) & exists x. S(x, y)"
        );
        let g = parse("indep(x ; y ; x)").unwrap();
        assert_eq!(rename_free(&g, "x", "u").to_string(), "indep(u ; y ; u)");
    }

    #[test]
    fn separates_rebound_variables() {
        let f = parse("R(x) & exists x. (S(x, y) & forall x. x = y)").unwrap();
        let g = standardize_apart(&f, &BTreeSet::from(["x".to_string(), "y".to_string()]));
        assert_eq!(
            g.to_string(),
            "R(x) & exists x_1. S(x_1, y) & forall x_2. x_2 = y"
        );
    }
}
