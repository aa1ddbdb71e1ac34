//! Support-level necessary conditions for partial witnesses.
//!
//! [`feasible`] over-approximates satisfiability: if some team whose support
//! contains `rows` satisfies `f`, then `feasible(f, rows)` holds. Columns
//! missing from `vars` are treated as not yet assigned. Only the
//! support-determined parts of a formula (literals, dependence-shaped atoms,
//! `&`, split disjunction, quantifiers) contribute; everything else is `true`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::structure::{Elem, Structure};
use crate::syntax::ast::{eval_literal_eq, eval_literal_rel, Formula, RowView, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowSet {
    pub vars: Vec<Var>,
    pub rows: BTreeSet<Vec<Elem>>,
}

impl RowSet {
    pub fn new(vars: Vec<Var>) -> Self {
        Self {
            vars,
            rows: BTreeSet::new(),
        }
    }

    fn single(&self, row: &[Elem]) -> Self {
        Self {
            vars: self.vars.clone(),
            rows: BTreeSet::from([row.to_vec()]),
        }
    }

    fn has(&self, v: &str) -> bool {
        self.vars.iter().any(|x| x == v)
    }

    fn index(&self, v: &str) -> Option<usize> {
        self.vars.iter().position(|x| x == v)
    }
}

fn term_assigned(rs: &RowSet, t: &Term) -> bool {
    match t {
        Term::Var(v) => rs.has(v),
        Term::Const(_) => true,
    }
}

fn dep_check(rs: &RowSet, lhs: &[Var], rhs: &[Var]) -> bool {
    let Some(li) = lhs.iter().map(|v| rs.index(v)).collect::<Option<Vec<_>>>() else {
        return true;
    };
    let ri: Vec<usize> = rhs.iter().filter_map(|v| rs.index(v)).collect();
    let mut seen: BTreeMap<Vec<Elem>, Vec<Elem>> = BTreeMap::new();
    for t in &rs.rows {
        let key: Vec<Elem> = li.iter().map(|&i| t[i]).collect();
        let val: Vec<Elem> = ri.iter().map(|&i| t[i]).collect();
        if let Some(prev) = seen.get(&key) {
            if *prev != val {
                return false;
            }
        } else {
            seen.insert(key, val);
        }
    }
    true
}

fn set_of(vs: &[Var]) -> BTreeSet<&Var> {
    vs.iter().collect()
}

/// Dependence `(lhs, rhs)` equivalent to the atom, when there is one.
pub fn as_dependence(f: &Formula) -> Option<(Vec<Var>, Vec<Var>)> {
    match f {
        Formula::Dep { lhs, rhs } => Some((lhs.clone(), rhs.clone())),
        Formula::Indep { cond, left, right } if set_of(left) == set_of(right) => {
            Some((cond.clone(), left.clone()))
        }
        Formula::Entropy { lhs, rhs } => {
            let (l, r) = (set_of(lhs), set_of(rhs));
            if l.is_subset(&r) {
                Some((
                    lhs.clone(),
                    rhs.iter().filter(|v| !l.contains(v)).cloned().collect(),
                ))
            } else if r.is_subset(&l) {
                Some((
                    rhs.clone(),
                    lhs.iter().filter(|v| !r.contains(v)).cloned().collect(),
                ))
            } else {
                None
            }
        }
        _ => None,
    }
}

pub fn feasible(st: &Structure, f: &Formula, rs: &RowSet) -> Result<bool> {
    if rs.rows.is_empty() {
        return Ok(true);
    }
    match f {
        Formula::Rel {
            name,
            args,
            negated,
        } => {
            if !args.iter().all(|t| term_assigned(rs, t)) {
                return Ok(true);
            }
            for r in &rs.rows {
                if !eval_literal_rel(
                    name,
                    args,
                    *negated,
                    &RowView {
                        vars: &rs.vars,
                        values: r,
                    },
                    st,
                )? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Eq {
            left,
            right,
            negated,
        } => {
            if !term_assigned(rs, left) || !term_assigned(rs, right) {
                return Ok(true);
            }
            for r in &rs.rows {
                if !eval_literal_eq(
                    left,
                    right,
                    *negated,
                    &RowView {
                        vars: &rs.vars,
                        values: r,
                    },
                    st,
                )? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::And(a, b) => Ok(feasible(st, a, rs)? && feasible(st, b, rs)?),
        Formula::SplitOr(a, b) => {
            let mut only_b = RowSet::new(rs.vars.clone());
            let mut only_a = RowSet::new(rs.vars.clone());
            for r in &rs.rows {
                let one = rs.single(r);
                let fa = feasible(st, a, &one)?;
                let fb = feasible(st, b, &one)?;
                match (fa, fb) {
                    (false, false) => return Ok(false),
                    (false, true) => {
                        only_b.rows.insert(r.clone());
                    }
                    (true, false) => {
                        only_a.rows.insert(r.clone());
                    }
                    (true, true) => {}
                }
            }
            Ok(feasible(st, b, &only_b)? && feasible(st, a, &only_a)?)
        }
        Formula::Forall(x, b) => {
            let (vars, pos) = match rs.index(x) {
                Some(i) => (rs.vars.clone(), i),
                None => {
                    let mut v = rs.vars.clone();
                    v.push(x.clone());
                    let n = v.len() - 1;
                    (v, n)
                }
            };
            let mut out = RowSet::new(vars);
            for r in &rs.rows {
                for a in st.elements() {
                    let mut t = r.clone();
                    if pos < t.len() {
                        t[pos] = a;
                    } else {
                        t.push(a);
                    }
                    out.rows.insert(t);
                }
            }
            feasible(st, b, &out)
        }
        Formula::Exists(x, b) => match rs.index(x) {
            Some(i) => {
                let vars: Vec<Var> = rs.vars.iter().filter(|v| *v != x).cloned().collect();
                let rows = rs
                    .rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != i)
                            .map(|(_, &e)| e)
                            .collect()
                    })
                    .collect();
                feasible(st, b, &RowSet { vars, rows })
            }
            None => feasible(st, b, rs),
        },
        atom => match as_dependence(atom) {
            Some((l, r)) => Ok(dep_check(rs, &l, &r)),
            None => Ok(true),
        },
    }
}
