use std::collections::BTreeSet;

use crate::atoms::rewrite::rewrite_dep_to_indep;
use crate::error::{Error, Result};
use crate::scalar::Rational;
use crate::structure::{Elem, Structure};
use crate::syntax::ast::{eval_literal_eq, eval_literal_rel, Formula, RowView, Var};
use crate::syntax::dialect::{dialect_of, free_vars, Dialect};
use crate::syntax::rename::standardize_apart;
use crate::team::WeightedTeam;

use super::{classify_body, stats_of, Mode, RFormula, RRel, RTerm, RealSystem, RealVar, VarId};

/// Compiles `f` in SAT mode, or in CHECK mode against `team`.
pub fn compile(
    st: &Structure,
    f: &Formula,
    mode: Mode,
    team: Option<&WeightedTeam>,
) -> Result<RealSystem> {
    let dialect = dialect_of(f)?;
    if dialect == Dialect::Fopt {
        return Err(Error::WrongDialect {
            expected: "FO_ATOMS_NEG".into(),
            found: "FOPT".into(),
        });
    }
    let fv: BTreeSet<Var> = free_vars(f);
    let tv: Vec<Var> = match (mode, team) {
        (Mode::Check, Some(t)) => {
            let set: BTreeSet<Var> = t.vars().iter().cloned().collect();
            if set != fv || set.len() != t.vars().len() {
                return Err(Error::CheckTeamMismatch {
                    team: t.vars().to_vec(),
                    formula: fv.into_iter().collect(),
                });
            }
            if t.is_empty() {
                return Err(Error::EmptyCheckTeam);
            }
            t.vars().to_vec()
        }
        (Mode::Check, None) => {
            if !fv.is_empty() {
                return Err(Error::CheckTeamMismatch {
                    team: vec![],
                    formula: fv.into_iter().collect(),
                });
            }
            vec![]
        }
        (Mode::Sat, _) => fv.iter().cloned().collect(),
    };
    let prepared = standardize_apart(&rewrite_dep_to_indep(f), &fv);

    let mut c = Compiler {
        st,
        names: element_names(st),
        vars: Vec::new(),
        nodes: 0,
    };
    let n = st.size();
    let k = tv.len();
    let mut outer = Vec::new();
    let mut s = Vec::new();
    for (idx, tuple) in st.tuples(k).enumerate() {
        let name = c.var_name("s", &tuple);
        let fixed = match (mode, team) {
            (Mode::Check, Some(t)) => Some(t.weight_of(&tuple)),
            (Mode::Check, None) => Some(Rational::from_integer(1.into())),
            (Mode::Sat, _) => None,
        };
        let id = c.vars.len();
        c.vars.push(RealVar {
            name,
            assignment: Some(tuple),
            fixed: fixed.clone(),
        });
        outer.push(id);
        s.push(match fixed {
            Some(w) => RTerm::Const(w),
            None => RTerm::Var(id),
        });
        debug_assert_eq!(idx + 1, s.len());
    }
    debug_assert_eq!(s.len(), n.pow(k as u32));

    let star = c.node(&prepared, &tv, &s)?;
    let mut parts: Vec<RFormula> = s
        .iter()
        .map(|w| RFormula::Atom(RTerm::zero(), RRel::Le, w.clone()))
        .collect();
    parts.push(RFormula::Not(Box::new(RFormula::Atom(
        RTerm::zero(),
        RRel::Eq,
        RTerm::Add(s.clone()),
    ))));
    parts.push(star);
    let inner = RFormula::And(parts);
    let body = match mode {
        Mode::Sat => RFormula::Exists(outer.clone(), Box::new(inner)),
        Mode::Check => inner,
    };
    let fragment = classify_body(&body, f.any(&|g| matches!(g, Formula::BoolNeg(_))));
    let stats = stats_of(c.vars.len(), outer.len(), &body);
    Ok(RealSystem {
        mode,
        fragment,
        free_vars: tv,
        vars: c.vars,
        outer,
        body,
        stats,
    })
}

/// Element names usable inside SMT-LIB symbols, or `e<i>` for all elements
/// when some name is not alphanumeric.
fn element_names(st: &Structure) -> Vec<String> {
    let simple = st
        .domain()
        .iter()
        .all(|n| !n.is_empty() && n.chars().all(|c| c.is_ascii_alphanumeric()));
    st.elements()
        .map(|e| {
            if simple {
                st.name(e).to_string()
            } else {
                format!("e{e}")
            }
        })
        .collect()
}

struct Compiler<'a> {
    st: &'a Structure,
    names: Vec<String>,
    vars: Vec<RealVar>,
    nodes: usize,
}

fn positions(tv: &[Var], vs: &[Var]) -> Result<Vec<usize>> {
    vs.iter()
        .map(|v| {
            tv.iter()
                .position(|x| x == v)
                .ok_or_else(|| Error::UnknownVariable(v.clone()))
        })
        .collect()
}

fn dedup(ps: Vec<usize>) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    ps.into_iter().filter(|p| seen.insert(*p)).collect()
}

impl Compiler<'_> {
    fn var_name(&self, prefix: &str, tuple: &[Elem]) -> String {
        let mut name = format!("{prefix}_v");
        for &e in tuple {
            name.push('_');
            name.push_str(&self.names[e]);
        }
        name
    }

    fn fresh_block(&mut self, prefix: &str, k: usize) -> Vec<VarId> {
        let tuples: Vec<Vec<Elem>> = self.st.tuples(k).collect();
        tuples
            .into_iter()
            .map(|t| {
                let id = self.vars.len();
                let name = self.var_name(prefix, &t);
                self.vars.push(RealVar {
                    name,
                    assignment: None,
                    fixed: None,
                });
                id
            })
            .collect()
    }

    /// Sum of the weights of the tuples taking values `vals` at `pos`.
    fn marginal(&self, k: usize, s: &[RTerm], pos: &[usize], vals: &[Elem]) -> RTerm {
        RTerm::Add(
            self.st
                .tuples(k)
                .zip(s)
                .filter(|(t, _)| pos.iter().zip(vals).all(|(&p, &v)| t[p] == v))
                .map(|(_, w)| w.clone())
                .collect(),
        )
    }

    fn node(&mut self, f: &Formula, tv: &[Var], s: &[RTerm]) -> Result<RFormula> {
        let k = tv.len();
        let n = self.st.size();
        match f {
            Formula::Rel { .. } | Formula::Eq { .. } => {
                let mut zeros = Vec::new();
                for (t, w) in self.st.tuples(k).zip(s) {
                    let row = RowView {
                        vars: tv,
                        values: &t,
                    };
                    let holds = match f {
                        Formula::Rel {
                            name,
                            args,
                            negated,
                        } => eval_literal_rel(name, args, *negated, &row, self.st)?,
                        Formula::Eq {
                            left,
                            right,
                            negated,
                        } => eval_literal_eq(left, right, *negated, &row, self.st)?,
                        _ => unreachable!(),
                    };
                    if !holds {
                        zeros.push(RFormula::Atom(w.clone(), RRel::Eq, RTerm::zero()));
                    }
                }
                Ok(RFormula::And(zeros))
            }
            Formula::Indep { cond, left, right } => {
                let px = dedup(positions(tv, cond)?);
                let py: Vec<usize> = dedup(positions(tv, left)?);
                let pz: Vec<usize> = dedup(positions(tv, right)?);
                let all = dedup(px.iter().chain(&py).chain(&pz).copied().collect());
                let pxy = dedup(px.iter().chain(&py).copied().collect());
                let pxz = dedup(px.iter().chain(&pz).copied().collect());
                let mut out = Vec::new();
                for vals in self.st.tuples(all.len()) {
                    let pick = |ps: &[usize]| -> Vec<Elem> {
                        ps.iter()
                            .map(|p| vals[all.iter().position(|q| q == p).expect("subset")])
                            .collect()
                    };
                    let lhs = RTerm::Mul(vec![
                        self.marginal(k, s, &pxy, &pick(&pxy)),
                        self.marginal(k, s, &pxz, &pick(&pxz)),
                    ]);
                    let rhs = RTerm::Mul(vec![
                        self.marginal(k, s, &all, &vals),
                        self.marginal(k, s, &px, &pick(&px)),
                    ]);
                    out.push(RFormula::Atom(lhs, RRel::Eq, rhs));
                }
                Ok(RFormula::And(out))
            }
            Formula::Marg { lhs, rhs } => {
                let (pl, pr) = (positions(tv, lhs)?, positions(tv, rhs)?);
                let mut out = Vec::new();
                for vals in self.st.tuples(pl.len()) {
                    out.push(RFormula::Atom(
                        self.marginal(k, s, &pl, &vals),
                        RRel::Eq,
                        self.marginal(k, s, &pr, &vals),
                    ));
                }
                Ok(RFormula::And(out))
            }
            Formula::Entropy { lhs, rhs } => {
                let side = |c: &Self, vs: &[Var]| -> Result<RTerm> {
                    let ps = dedup(positions(tv, vs)?);
                    Ok(RTerm::Add(
                        c.st.tuples(ps.len())
                            .map(|vals| RTerm::XLogX(Box::new(c.marginal(k, s, &ps, &vals))))
                            .collect(),
                    ))
                };
                Ok(RFormula::Atom(side(self, lhs)?, RRel::Eq, side(self, rhs)?))
            }
            Formula::Dep { .. } => self.node(&rewrite_dep_to_indep(f), tv, s),
            Formula::BoolNeg(b) => Ok(RFormula::Not(Box::new(self.node(b, tv, s)?))),
            Formula::And(a, b) => Ok(RFormula::And(vec![
                self.node(a, tv, s)?,
                self.node(b, tv, s)?,
            ])),
            Formula::SplitOr(a, b) => {
                self.nodes += 1;
                let id = self.nodes;
                let t = self.fresh_block(&format!("t{id}"), k);
                let r = self.fresh_block(&format!("r{id}"), k);
                let tt: Vec<RTerm> = t.iter().map(|&v| RTerm::Var(v)).collect();
                let rt: Vec<RTerm> = r.iter().map(|&v| RTerm::Var(v)).collect();
                let mut parts = Vec::new();
                for i in 0..s.len() {
                    parts.push(RFormula::Atom(RTerm::zero(), RRel::Le, tt[i].clone()));
                    parts.push(RFormula::Atom(RTerm::zero(), RRel::Le, rt[i].clone()));
                    parts.push(RFormula::Atom(
                        s[i].clone(),
                        RRel::Eq,
                        RTerm::Add(vec![tt[i].clone(), rt[i].clone()]),
                    ));
                }
                parts.push(self.node(a, tv, &tt)?);
                parts.push(self.node(b, tv, &rt)?);
                Ok(RFormula::Exists(
                    t.into_iter().chain(r).collect(),
                    Box::new(RFormula::And(parts)),
                ))
            }
            Formula::Exists(x, b) | Formula::Forall(x, b) => {
                if tv.contains(x) {
                    return Err(Error::Unsupported(format!(
                        "variable `{x}` is quantified twice"
                    )));
                }
                self.nodes += 1;
                let id = self.nodes;
                let t = self.fresh_block(&format!("t{id}"), k + 1);
                let tt: Vec<RTerm> = t.iter().map(|&v| RTerm::Var(v)).collect();
                let mut parts = Vec::new();
                for w in &tt {
                    parts.push(RFormula::Atom(RTerm::zero(), RRel::Le, w.clone()));
                }
                for (i, w) in s.iter().enumerate() {
                    let slice = &tt[i * n..(i + 1) * n];
                    parts.push(RFormula::Atom(
                        w.clone(),
                        RRel::Eq,
                        RTerm::Add(slice.to_vec()),
                    ));
                    if matches!(f, Formula::Forall(..)) {
                        for c in 0..n {
                            for d in c + 1..n {
                                parts.push(RFormula::Atom(
                                    slice[c].clone(),
                                    RRel::Eq,
                                    slice[d].clone(),
                                ));
                            }
                        }
                    }
                }
                let mut tv2 = tv.to_vec();
                tv2.push(x.clone());
                parts.push(self.node(b, &tv2, &tt)?);
                Ok(RFormula::Exists(t, Box::new(RFormula::And(parts))))
            }
            other => Err(Error::WrongDialect {
                expected: "FO_ATOMS_NEG".into(),
                found: other.to_string(),
            }),
        }
    }
}
