//! Compilation of team formulas over a fixed finite structure into
//! first-order sentences of real arithmetic.
//!
//! One real variable `s_v_a1_…_ak` stands for the weight of the assignment
//! mapping the free variables `v̄` to `ā`. Each connective introduces
//! auxiliary weight variables: split disjunction splits every weight into
//! `t + r`, quantifiers distribute weights over the new column.

mod compile;
mod smtlib;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, Rational, Scalar};
use crate::structure::{Elem, Structure};
use crate::syntax::ast::Var;

pub use compile::compile;
pub use smtlib::emit_smtlib2;

pub type VarId = usize;

/// Real-valued term.
#[derive(Debug, Clone, PartialEq)]
pub enum RTerm {
    Var(VarId),
    Const(Rational),
    /// Empty sum is `0`.
    Add(Vec<RTerm>),
    /// Empty product is `1`.
    Mul(Vec<RTerm>),
    /// `t·log₂ t`, with value `0` at `t = 0`.
    XLogX(Box<RTerm>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RRel {
    Eq,
    Le,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RFormula {
    Atom(RTerm, RRel, RTerm),
    Not(Box<RFormula>),
    /// Empty conjunction is true.
    And(Vec<RFormula>),
    Or(Vec<RFormula>),
    Exists(Vec<VarId>, Box<RFormula>),
    Forall(Vec<VarId>, Box<RFormula>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fragment {
    Existential,
    Full,
    ExistentialLog,
    FullLog,
}

impl Fragment {
    pub fn is_existential(self) -> bool {
        matches!(self, Fragment::Existential | Fragment::ExistentialLog)
    }

    pub fn has_log(self) -> bool {
        matches!(self, Fragment::ExistentialLog | Fragment::FullLog)
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::Existential => "EXISTENTIAL",
            Fragment::Full => "FULL",
            Fragment::ExistentialLog => "EXISTENTIAL_LOG",
            Fragment::FullLog => "FULL_LOG",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Outer weights are existentially quantified.
    Sat,
    /// Outer weights are the rational weights of a given team.
    Check,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sat => "SAT",
            Mode::Check => "CHECK",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealVar {
    pub name: String,
    /// For outer variables: the assignment of the free variables.
    pub assignment: Option<Vec<Elem>>,
    /// Team weight substituted for the variable in CHECK mode.
    pub fixed: Option<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CompileStats {
    pub num_vars: usize,
    pub outer_vars: usize,
    pub num_products: usize,
    pub num_sums: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealSystem {
    pub mode: Mode,
    pub fragment: Fragment,
    /// Free variables of the source formula, in the order of the outer tuples.
    pub free_vars: Vec<Var>,
    pub vars: Vec<RealVar>,
    pub outer: Vec<VarId>,
    pub body: RFormula,
    pub stats: CompileStats,
}

/// Constraint of an existential system, after flattening.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub lhs: RTerm,
    pub rel: ConstraintRel,
    pub rhs: RTerm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintRel {
    Eq,
    Le,
    Lt,
    Ne,
}

impl RTerm {
    pub fn zero() -> Self {
        RTerm::Const(Rational::zero())
    }

    pub fn has_log(&self) -> bool {
        match self {
            RTerm::XLogX(_) => true,
            RTerm::Add(ts) | RTerm::Mul(ts) => ts.iter().any(RTerm::has_log),
            _ => false,
        }
    }

    fn count(&self, sums: &mut usize, products: &mut usize) {
        match self {
            RTerm::Add(ts) => {
                *sums += 1;
                ts.iter().for_each(|t| t.count(sums, products));
            }
            RTerm::Mul(ts) => {
                *products += 1;
                ts.iter().for_each(|t| t.count(sums, products));
            }
            RTerm::XLogX(t) => t.count(sums, products),
            _ => {}
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<VarId>) {
        match self {
            RTerm::Var(v) => out.push(*v),
            RTerm::Add(ts) | RTerm::Mul(ts) => ts.iter().for_each(|t| t.collect_vars(out)),
            RTerm::XLogX(t) => t.collect_vars(out),
            RTerm::Const(_) => {}
        }
    }

    /// Exact value; `None` for terms with a logarithm.
    pub fn eval_exact(&self, values: &[Option<Rational>]) -> Result<Option<Rational>> {
        Ok(match self {
            RTerm::Var(v) => Some(
                values
                    .get(*v)
                    .cloned()
                    .flatten()
                    .ok_or_else(|| Error::MissingVariable(v.to_string()))?,
            ),
            RTerm::Const(c) => Some(c.clone()),
            RTerm::Add(ts) => {
                let mut acc = Rational::zero();
                for t in ts {
                    match t.eval_exact(values)? {
                        Some(v) => acc += v,
                        None => return Ok(None),
                    }
                }
                Some(acc)
            }
            RTerm::Mul(ts) => {
                let mut acc = Rational::one();
                for t in ts {
                    match t.eval_exact(values)? {
                        Some(v) => acc *= v,
                        None => return Ok(None),
                    }
                }
                Some(acc)
            }
            RTerm::XLogX(_) => None,
        })
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        match self {
            RTerm::Var(v) => x[*v],
            RTerm::Const(c) => c.to_f64(),
            RTerm::Add(ts) => ts.iter().map(|t| t.eval_f64(x)).sum(),
            RTerm::Mul(ts) => ts.iter().map(|t| t.eval_f64(x)).product(),
            RTerm::XLogX(t) => xlogx(t.eval_f64(x)),
        }
    }

    /// Adds `seed · ∂self/∂x` to `grad`.
    pub fn backprop(&self, x: &[f64], seed: f64, grad: &mut [f64]) {
        if seed == 0.0 {
            return;
        }
        match self {
            RTerm::Var(v) => grad[*v] += seed,
            RTerm::Const(_) => {}
            RTerm::Add(ts) => ts.iter().for_each(|t| t.backprop(x, seed, grad)),
            RTerm::Mul(ts) => {
                let vals: Vec<f64> = ts.iter().map(|t| t.eval_f64(x)).collect();
                for (i, t) in ts.iter().enumerate() {
                    let others: f64 = vals
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, v)| v)
                        .product();
                    t.backprop(x, seed * others, grad);
                }
            }
            RTerm::XLogX(t) => {
                let v = t.eval_f64(x).max(1e-12);
                t.backprop(x, seed * (v.log2() + std::f64::consts::LOG2_E), grad);
            }
        }
    }
}

/// `t·log₂ t` extended by continuity (and by `0` below zero).
pub fn xlogx(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t * t.log2()
    }
}

impl RFormula {
    pub fn truth() -> Self {
        RFormula::And(vec![])
    }

    pub fn depth(&self) -> usize {
        match self {
            RFormula::Atom(..) => 1,
            RFormula::Not(b) | RFormula::Exists(_, b) | RFormula::Forall(_, b) => 1 + b.depth(),
            RFormula::And(bs) | RFormula::Or(bs) => {
                1 + bs.iter().map(RFormula::depth).max().unwrap_or(0)
            }
        }
    }

    fn visit_terms(&self, f: &mut impl FnMut(&RTerm)) {
        match self {
            RFormula::Atom(a, _, b) => {
                f(a);
                f(b);
            }
            RFormula::Not(b) | RFormula::Exists(_, b) | RFormula::Forall(_, b) => b.visit_terms(f),
            RFormula::And(bs) | RFormula::Or(bs) => bs.iter().for_each(|b| b.visit_terms(f)),
        }
    }

    fn is_full(&self) -> bool {
        match self {
            RFormula::Atom(..) => false,
            RFormula::Not(b) => !matches!(**b, RFormula::Atom(..)),
            RFormula::Forall(..) | RFormula::Or(..) => true,
            RFormula::Exists(_, b) => b.is_full(),
            RFormula::And(bs) => bs.iter().any(RFormula::is_full),
        }
    }
}

/// Fragment of a compiled body: FULL when the source had Boolean negation
/// or the body has a universal quantifier, a disjunction or a negation above
/// a non-atomic node; `_LOG` when an entropy term occurs.
pub(crate) fn classify_body(body: &RFormula, negated_source: bool) -> Fragment {
    let mut log = false;
    body.visit_terms(&mut |t| log |= t.has_log());
    match (negated_source || body.is_full(), log) {
        (false, false) => Fragment::Existential,
        (true, false) => Fragment::Full,
        (false, true) => Fragment::ExistentialLog,
        (true, true) => Fragment::FullLog,
    }
}

pub fn classify(sys: &RealSystem) -> Fragment {
    sys.fragment
}

pub(crate) fn stats_of(vars: usize, outer: usize, body: &RFormula) -> CompileStats {
    let (mut sums, mut products) = (0, 0);
    body.visit_terms(&mut |t| t.count(&mut sums, &mut products));
    CompileStats {
        num_vars: vars,
        outer_vars: outer,
        num_products: products,
        num_sums: sums,
        depth: body.depth(),
    }
}

impl RealSystem {
    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Quantified variables and conjunctive constraints of an existential
    /// system.
    pub fn existential_constraints(&self) -> Result<(Vec<VarId>, Vec<Constraint>)> {
        if !self.fragment.is_existential() {
            return Err(Error::NonExistentialSystem(self.fragment.to_string()));
        }
        let mut unknowns = Vec::new();
        let mut out = Vec::new();
        flatten(&self.body, &mut unknowns, &mut out, &self.fragment)?;
        Ok((unknowns, out))
    }

    /// Evaluates a system whose body has no real quantifiers left.
    pub fn eval_closed(&self) -> Result<bool> {
        eval_closed(&self.body)
    }

    /// JSON sidecar: fragment, mode, statistics and the names of the outer
    /// variables with their assignments.
    pub fn sidecar(&self, st: &Structure) -> Value {
        let outer: Vec<Value> = self
            .outer
            .iter()
            .map(|&id| {
                let v = &self.vars[id];
                let assignment: serde_json::Map<String, Value> = self
                    .free_vars
                    .iter()
                    .zip(v.assignment.as_deref().unwrap_or(&[]))
                    .map(|(x, e)| (x.clone(), Value::String(st.name(*e).to_string())))
                    .collect();
                let mut o = json!({ "name": v.name, "assignment": assignment });
                if let Some(w) = &v.fixed {
                    o["weight"] = Value::String(format_rational(w));
                }
                o
            })
            .collect();
        json!({
            "mode": self.mode.to_string(),
            "fragment": self.fragment.to_string(),
            "free_vars": self.free_vars,
            "stats": {
                "num_vars": self.stats.num_vars,
                "outer_vars": self.stats.outer_vars,
                "num_products": self.stats.num_products,
                "num_sums": self.stats.num_sums,
                "depth": self.stats.depth,
            },
            "outer": outer,
        })
    }

    /// Solver witness in terms of variable names.
    pub fn named(&self, values: &BTreeMap<VarId, Rational>) -> BTreeMap<String, Rational> {
        values
            .iter()
            .map(|(id, v)| (self.vars[*id].name.clone(), v.clone()))
            .collect()
    }
}

fn flatten(
    f: &RFormula,
    unknowns: &mut Vec<VarId>,
    out: &mut Vec<Constraint>,
    frag: &Fragment,
) -> Result<()> {
    let bad = || Error::NonExistentialSystem(frag.to_string());
    match f {
        RFormula::Atom(a, rel, b) => out.push(Constraint {
            lhs: a.clone(),
            rel: match rel {
                RRel::Eq => ConstraintRel::Eq,
                RRel::Le => ConstraintRel::Le,
            },
            rhs: b.clone(),
        }),
        RFormula::Not(inner) => match &**inner {
            RFormula::Atom(a, RRel::Eq, b) => out.push(Constraint {
                lhs: a.clone(),
                rel: ConstraintRel::Ne,
                rhs: b.clone(),
            }),
            RFormula::Atom(a, RRel::Le, b) => out.push(Constraint {
                lhs: b.clone(),
                rel: ConstraintRel::Lt,
                rhs: a.clone(),
            }),
            _ => return Err(bad()),
        },
        RFormula::And(bs) => {
            for b in bs {
                flatten(b, unknowns, out, frag)?;
            }
        }
        RFormula::Exists(vs, b) => {
            unknowns.extend(vs.iter().copied());
            flatten(b, unknowns, out, frag)?;
        }
        RFormula::Or(_) | RFormula::Forall(..) => return Err(bad()),
    }
    Ok(())
}

fn eval_closed(f: &RFormula) -> Result<bool> {
    Ok(match f {
        RFormula::Atom(a, rel, b) => {
            let mut vs = Vec::new();
            a.collect_vars(&mut vs);
            b.collect_vars(&mut vs);
            if let Some(v) = vs.first() {
                return Err(Error::MissingVariable(v.to_string()));
            }
            let none = &[];
            match (a.eval_exact(none)?, b.eval_exact(none)?) {
                (Some(x), Some(y)) => match rel {
                    RRel::Eq => x == y,
                    RRel::Le => x <= y,
                },
                _ => {
                    let (x, y) = (a.eval_f64(&[]), b.eval_f64(&[]));
                    match rel {
                        RRel::Eq => x.approx_eq(&y),
                        RRel::Le => x <= y || x.approx_eq(&y),
                    }
                }
            }
        }
        RFormula::Not(b) => !eval_closed(b)?,
        RFormula::And(bs) => {
            for b in bs {
                if !eval_closed(b)? {
                    return Ok(false);
                }
            }
            true
        }
        RFormula::Or(bs) => {
            for b in bs {
                if eval_closed(b)? {
                    return Ok(true);
                }
            }
            false
        }
        RFormula::Exists(..) | RFormula::Forall(..) => {
            return Err(Error::Unsupported(
                "system still has quantified real variables".into(),
            ))
        }
    })
}
