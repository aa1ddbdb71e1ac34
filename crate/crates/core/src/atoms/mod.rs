//! Exact semantics of the team atoms and the rewrites between them.

pub mod entropy;
pub mod rewrite;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::structure::{Elem, Structure};
use crate::syntax::ast::{eval_literal_eq, eval_literal_rel, Formula, Var};
use crate::team::WeightedTeam;

pub use entropy::{entropy, entropy_of};
pub use rewrite::{rewrite_dep_to_entropy, rewrite_dep_to_indep, rewrite_indep_to_entropy};

/// Absolute tolerance used when comparing entropies.
pub const DEFAULT_ENTROPY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomConfig {
    pub entropy_tol: f64,
}

impl Default for AtomConfig {
    fn default() -> Self {
        Self {
            entropy_tol: DEFAULT_ENTROPY_TOL,
        }
    }
}

pub fn eval_atom<W: Scalar>(
    st: &Structure,
    team: &WeightedTeam<W>,
    atom: &Formula,
) -> Result<bool> {
    eval_atom_with(st, team, atom, &AtomConfig::default())
}

pub fn eval_atom_with<W: Scalar>(
    st: &Structure,
    team: &WeightedTeam<W>,
    atom: &Formula,
    cfg: &AtomConfig,
) -> Result<bool> {
    match atom {
        Formula::Rel {
            name,
            args,
            negated,
        } => {
            check_vars(team, atom)?;
            for (t, w) in team.rows() {
                if !w.is_zero() && !eval_literal_rel(name, args, *negated, &team.view(t), st)? {
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
            check_vars(team, atom)?;
            for (t, w) in team.rows() {
                if !w.is_zero() && !eval_literal_eq(left, right, *negated, &team.view(t), st)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Indep { cond, left, right } => indep(team, cond, left, right),
        Formula::Dep { lhs, rhs } => dep(team, lhs, rhs),
        Formula::Marg { lhs, rhs } => {
            if lhs.len() != rhs.len() {
                return Err(Error::MargArity(lhs.len(), rhs.len()));
            }
            let a = nonzero(team.marginal(lhs)?);
            let b = nonzero(team.marginal(rhs)?);
            Ok(a.len() == b.len()
                && a.iter()
                    .all(|(k, w)| b.get(k).is_some_and(|v| v.approx_eq(w))))
        }
        Formula::Entropy { lhs, rhs } => {
            let hl = entropy(team, lhs)?;
            let hr = entropy(team, rhs)?;
            Ok((hl - hr).abs() <= cfg.entropy_tol)
        }
        Formula::Cmp(cs) => {
            let w = |i: usize| team.weight(st, &cs[i]);
            let w01 = team.weight(
                st,
                &crate::syntax::ast::Condition::and(cs[0].clone(), cs[1].clone()),
            )?;
            let w23 = team.weight(
                st,
                &crate::syntax::ast::Condition::and(cs[2].clone(), cs[3].clone()),
            )?;
            let lhs = w01 * w(3)?;
            let rhs = w23 * w(1)?;
            Ok(lhs < rhs || lhs.approx_eq(&rhs))
        }
        other => Err(Error::NotAnAtom(other.to_string())),
    }
}

fn check_vars<W: Scalar>(team: &WeightedTeam<W>, atom: &Formula) -> Result<()> {
    for v in crate::syntax::dialect::free_vars(atom) {
        team.var_index(&v)?;
    }
    Ok(())
}

fn nonzero<W: Scalar>(m: BTreeMap<Vec<Elem>, W>) -> BTreeMap<Vec<Elem>, W> {
    m.into_iter().filter(|(_, w)| !w.is_zero()).collect()
}

fn sorted_set<'a>(parts: impl IntoIterator<Item = &'a Vec<Var>>) -> Vec<Var> {
    parts
        .into_iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Support-level functional dependence: equal `lhs` values force equal `rhs` values.
fn dep<W: Scalar>(team: &WeightedTeam<W>, lhs: &[Var], rhs: &[Var]) -> Result<bool> {
    let li = team.indices(lhs)?;
    let ri = team.indices(rhs)?;
    let mut seen: BTreeMap<Vec<Elem>, Vec<Elem>> = BTreeMap::new();
    for (t, w) in team.rows() {
        if w.is_zero() {
            continue;
        }
        let key: Vec<Elem> = li.iter().map(|&i| t[i]).collect();
        let val: Vec<Elem> = ri.iter().map(|&i| t[i]).collect();
        match seen.get(&key) {
            Some(prev) if *prev != val => return Ok(false),
            Some(_) => {}
            None => {
                seen.insert(key, val);
            }
        }
    }
    Ok(true)
}

/// `left ⊥⊥_cond right`: for every assignment `s` of the atom's variables,
/// `|X_{xy=s(xy)}| · |X_{xz=s(xz)}| = |X_{xyz=s(xyz)}| · |X_{x=s(x)}|`.
///
/// Marginals are taken over variable sets, so repeated or shared variables
/// are handled by requiring assignments to agree on them. Only pairs of
/// support points of the `xy` and `xz` marginals need checking: every other
/// assignment makes both sides zero.
fn indep<W: Scalar>(
    team: &WeightedTeam<W>,
    cond: &[Var],
    left: &[Var],
    right: &[Var],
) -> Result<bool> {
    let vx = sorted_set([&cond.to_vec()]);
    let vxy = sorted_set([&cond.to_vec(), &left.to_vec()]);
    let vxz = sorted_set([&cond.to_vec(), &right.to_vec()]);
    let vxyz = sorted_set([&cond.to_vec(), &left.to_vec(), &right.to_vec()]);
    let mx = team.marginal(&vx)?;
    let mxy = nonzero(team.marginal(&vxy)?);
    let mxz = nonzero(team.marginal(&vxz)?);
    let mxyz = team.marginal(&vxyz)?;

    let shared: Vec<Var> = vxy.iter().filter(|v| vxz.contains(v)).cloned().collect();
    let pick = |vars: &[Var], from: &[Var], t: &[Elem]| -> Vec<Elem> {
        vars.iter()
            .map(|v| t[from.iter().position(|f| f == v).expect("subset")])
            .collect()
    };
    let mut by_shared: BTreeMap<Vec<Elem>, Vec<(&Vec<Elem>, &W)>> = BTreeMap::new();
    for (t, w) in &mxz {
        by_shared
            .entry(pick(&shared, &vxz, t))
            .or_default()
            .push((t, w));
    }
    for (ty, wy) in &mxy {
        let key = pick(&shared, &vxy, ty);
        let x_val = pick(&vx, &vxy, ty);
        let wx = mx.get(&x_val).cloned().unwrap_or_else(W::zero);
        let Some(partners) = by_shared.get(&key) else {
            continue;
        };
        for (tz, wz) in partners {
            let full: Vec<Elem> = vxyz
                .iter()
                .map(|v| match vxy.iter().position(|f| f == v) {
                    Some(i) => ty[i],
                    None => tz[vxz.iter().position(|f| f == v).expect("covered")],
                })
                .collect();
            let wxyz = mxyz.get(&full).cloned().unwrap_or_else(W::zero);
            let lhs = wy.clone() * (*wz).clone();
            let rhs = wxyz * wx.clone();
            if !lhs.approx_eq(&rhs) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use crate::syntax::parser::parse;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn check(team: &WeightedTeam, text: &str) -> bool {
        let st = Structure::with_size(3).unwrap();
        eval_atom(&st, team, &parse(text).unwrap()).unwrap()
    }

    #[test]
    fn correlated_team() {
        let t = WeightedTeam::from_rows(["x", "y"], [(vec![0, 0], q(1, 2)), (vec![1, 1], q(1, 2))])
            .unwrap();
        assert!(check(&t, "dep(x ; y)"));
        assert!(!check(&t, "indep( ; x ; y)"));
        assert!(check(&t, "indep(x ; y ; y)"));
        assert!(check(&t, "marg(x ; y)"));
        assert!(check(&t, "entropy(x ; y)"));
        assert!(check(&t, "entropy(x ; x y)"));
    }

    #[test]
    fn product_team_is_independent() {
        let rows = [
            (vec![0, 0], q(1, 6)),
            (vec![0, 1], q(1, 3)),
            (vec![1, 0], q(1, 6)),
            (vec![1, 1], q(1, 3)),
        ];
        let t = WeightedTeam::from_rows(["x", "y"], rows).unwrap();
        assert!(check(&t, "indep( ; x ; y)"));
        assert!(check(&t, "indep( ; y ; x)"));
        assert!(!check(&t, "dep(x ; y)"));
        assert!(!check(&t, "marg(x ; y)"));
        assert!(check(&t, "marg(x y ; x y)"));
    }

    #[test]
    fn shared_variables() {
        // y ⊥⊥ y holds exactly when y is constant on the support.
        let t = WeightedTeam::from_rows(["x", "y"], [(vec![0, 1], q(1, 2)), (vec![1, 1], q(1, 2))])
            .unwrap();
        assert!(check(&t, "indep( ; y ; y)"));
        assert!(!check(&t, "indep( ; x ; x)"));
        assert!(check(&t, "indep( ; x y ; y)"));
    }

    #[test]
    fn errors() {
        let st = Structure::with_size(2).unwrap();
        let t = WeightedTeam::<Rational>::from_rows(["x"], [(vec![0], q(1, 1))]).unwrap();
        assert!(matches!(
            eval_atom(&st, &t, &parse("dep(x ; z)").unwrap()),
            Err(Error::UnknownVariable(_))
        ));
        assert!(matches!(
            eval_atom(&st, &t, &parse("exists y. dep(x ; y)").unwrap()),
            Err(Error::NotAnAtom(_))
        ));
        let empty = WeightedTeam::<Rational>::empty(["x"]).unwrap();
        assert!(matches!(
            eval_atom(&st, &empty, &parse("entropy(x ; x)").unwrap()),
            Err(Error::ZeroWeightTeam)
        ));
    }

    #[test]
    fn literals_check_support_only() {
        let mut st = Structure::with_size(2).unwrap();
        st.add_relation_indices("R", 1, [vec![0]]).unwrap();
        let t = WeightedTeam::from_rows(["x"], [(vec![0], q(1, 1)), (vec![1], q(0, 1))]).unwrap();
        assert!(eval_atom(&st, &t, &parse("R(x)").unwrap()).unwrap());
        assert!(eval_atom(&st, &t, &parse("x = @zero").unwrap()).unwrap());
        assert!(!eval_atom(&st, &t, &parse("x != @zero").unwrap()).unwrap());
    }
}
