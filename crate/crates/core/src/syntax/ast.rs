use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::structure::{Elem, Structure};

pub type Var = String;

/// Argument of a relational or equality literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    /// Named structure constant, written `@name`.
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

/// Variable lookup for first-order evaluation.
pub trait Assignment {
    fn get(&self, var: &str) -> Option<Elem>;
}

impl Assignment for BTreeMap<String, Elem> {
    fn get(&self, var: &str) -> Option<Elem> {
        BTreeMap::get(self, var).copied()
    }
}

/// A team row viewed as an assignment.
#[derive(Debug, Clone, Copy)]
pub struct RowView<'a> {
    pub vars: &'a [Var],
    pub values: &'a [Elem],
}

impl Assignment for RowView<'_> {
    fn get(&self, var: &str) -> Option<Elem> {
        self.vars
            .iter()
            .position(|v| v == var)
            .map(|i| self.values[i])
    }
}

pub fn eval_term(term: &Term, a: &impl Assignment, st: &Structure) -> Result<Elem> {
    match term {
        Term::Var(v) => a.get(v).ok_or_else(|| Error::UnboundVariable(v.clone())),
        Term::Const(c) => st.constant(c),
    }
}

pub fn eval_literal_rel(
    name: &str,
    args: &[Term],
    negated: bool,
    a: &impl Assignment,
    st: &Structure,
) -> Result<bool> {
    let vals = args
        .iter()
        .map(|t| eval_term(t, a, st))
        .collect::<Result<Vec<_>>>()?;
    Ok(st.holds(name, &vals)? != negated)
}

pub fn eval_literal_eq(
    left: &Term,
    right: &Term,
    negated: bool,
    a: &impl Assignment,
    st: &Structure,
) -> Result<bool> {
    Ok((eval_term(left, a, st)? == eval_term(right, a, st)?) != negated)
}

/// Quantifier- and disjunction-free first-order condition (the `δ` of
/// conditional comparison atoms and of team weights `|X_δ|`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Condition {
    Rel {
        name: String,
        args: Vec<Term>,
        negated: bool,
    },
    Eq {
        left: Term,
        right: Term,
        negated: bool,
    },
    Not(Box<Condition>),
    And(Box<Condition>, Box<Condition>),
}

impl Condition {
    pub fn rel(name: &str, args: &[&str]) -> Self {
        Condition::Rel {
            name: name.into(),
            args: args.iter().map(|a| Term::var(*a)).collect(),
            negated: false,
        }
    }

    pub fn eq(left: &str, right: &str) -> Self {
        Condition::Eq {
            left: Term::var(left),
            right: Term::var(right),
            negated: false,
        }
    }

    pub fn and(a: Condition, b: Condition) -> Self {
        Condition::And(Box::new(a), Box::new(b))
    }

    pub fn not(c: Condition) -> Self {
        Condition::Not(Box::new(c))
    }

    pub fn eval(&self, a: &impl Assignment, st: &Structure) -> Result<bool> {
        match self {
            Condition::Rel {
                name,
                args,
                negated,
            } => eval_literal_rel(name, args, *negated, a, st),
            Condition::Eq {
                left,
                right,
                negated,
            } => eval_literal_eq(left, right, *negated, a, st),
            Condition::Not(c) => Ok(!c.eval(a, st)?),
            Condition::And(l, r) => Ok(l.eval(a, st)? && r.eval(a, st)?),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Condition::Rel { args, .. } => {
                for t in args {
                    if let Term::Var(v) = t {
                        out.push(v.clone());
                    }
                }
            }
            Condition::Eq { left, right, .. } => {
                for t in [left, right] {
                    if let Term::Var(v) = t {
                        out.push(v.clone());
                    }
                }
            }
            Condition::Not(c) => c.collect_vars(out),
            Condition::And(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }
}

/// Formulas of every dialect handled by the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    /// `R(x̄)` or `!R(x̄)`.
    Rel {
        name: String,
        args: Vec<Term>,
        negated: bool,
    },
    /// `x = y` or `x != y`.
    Eq {
        left: Term,
        right: Term,
        negated: bool,
    },
    /// `indep(cond ; left ; right)`: `left ⊥⊥_cond right`.
    Indep {
        cond: Vec<Var>,
        left: Vec<Var>,
        right: Vec<Var>,
    },
    /// `dep(lhs ; rhs)`: `rhs` is functionally determined by `lhs`.
    Dep {
        lhs: Vec<Var>,
        rhs: Vec<Var>,
    },
    /// `marg(lhs ; rhs)`: marginal identity.
    Marg {
        lhs: Vec<Var>,
        rhs: Vec<Var>,
    },
    /// `entropy(lhs ; rhs)`: `H(lhs) = H(rhs)`.
    Entropy {
        lhs: Vec<Var>,
        rhs: Vec<Var>,
    },
    /// `cmp(δ0 | δ1 <= δ2 | δ3)`.
    Cmp(Box<[Condition; 4]>),
    /// Boolean negation `~`.
    BoolNeg(Box<Formula>),
    /// Weak (dot) negation `not`, true on empty teams.
    DotNeg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// Split disjunction `\/`.
    SplitOr(Box<Formula>, Box<Formula>),
    /// Global disjunction `||`.
    GlobalOr(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
    /// Single-element quantifier `E1`.
    Exists1(Var, Box<Formula>),
    /// Single-element quantifier `A1`.
    Forall1(Var, Box<Formula>),
}

/// Path from the root to a node: the sequence of child indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AstPath(pub Vec<u8>);

impl AstPath {
    pub fn root() -> Self {
        AstPath(Vec::new())
    }

    pub fn child(&self, i: u8) -> Self {
        let mut p = self.0.clone();
        p.push(i);
        AstPath(p)
    }

    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        if text == "/" {
            return Some(Self::root());
        }
        let rest = text.strip_prefix('/')?;
        rest.split('/')
            .map(|s| s.parse::<u8>().ok())
            .collect::<Option<Vec<_>>>()
            .map(AstPath)
    }
}

impl fmt::Display for AstPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "/");
        }
        for i in &self.0 {
            write!(f, "/{i}")?;
        }
        Ok(())
    }
}

fn vars(names: &[&str]) -> Vec<Var> {
    names.iter().map(|s| s.to_string()).collect()
}

impl Formula {
    pub fn rel(name: &str, args: &[&str]) -> Self {
        Formula::Rel {
            name: name.into(),
            args: args.iter().map(|a| Term::var(*a)).collect(),
            negated: false,
        }
    }

    pub fn not_rel(name: &str, args: &[&str]) -> Self {
        Formula::Rel {
            name: name.into(),
            args: args.iter().map(|a| Term::var(*a)).collect(),
            negated: true,
        }
    }

    pub fn eq(left: &str, right: &str) -> Self {
        Formula::Eq {
            left: Term::var(left),
            right: Term::var(right),
            negated: false,
        }
    }

    pub fn neq(left: &str, right: &str) -> Self {
        Formula::Eq {
            left: Term::var(left),
            right: Term::var(right),
            negated: true,
        }
    }

    pub fn indep(cond: &[&str], left: &[&str], right: &[&str]) -> Self {
        Formula::Indep {
            cond: vars(cond),
            left: vars(left),
            right: vars(right),
        }
    }

    pub fn dep(lhs: &[&str], rhs: &[&str]) -> Self {
        Formula::Dep {
            lhs: vars(lhs),
            rhs: vars(rhs),
        }
    }

    pub fn marg(lhs: &[&str], rhs: &[&str]) -> Self {
        Formula::Marg {
            lhs: vars(lhs),
            rhs: vars(rhs),
        }
    }

    pub fn entropy(lhs: &[&str], rhs: &[&str]) -> Self {
        Formula::Entropy {
            lhs: vars(lhs),
            rhs: vars(rhs),
        }
    }

    pub fn cmp(c0: Condition, c1: Condition, c2: Condition, c3: Condition) -> Self {
        Formula::Cmp(Box::new([c0, c1, c2, c3]))
    }

    pub fn bool_neg(f: Formula) -> Self {
        Formula::BoolNeg(Box::new(f))
    }

    pub fn dot_neg(f: Formula) -> Self {
        Formula::DotNeg(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn split_or(a: Formula, b: Formula) -> Self {
        Formula::SplitOr(Box::new(a), Box::new(b))
    }

    pub fn global_or(a: Formula, b: Formula) -> Self {
        Formula::GlobalOr(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, f: Formula) -> Self {
        Formula::Exists(v.into(), Box::new(f))
    }

    pub fn forall(v: &str, f: Formula) -> Self {
        Formula::Forall(v.into(), Box::new(f))
    }

    pub fn exists1(v: &str, f: Formula) -> Self {
        Formula::Exists1(v.into(), Box::new(f))
    }

    pub fn forall1(v: &str, f: Formula) -> Self {
        Formula::Forall1(v.into(), Box::new(f))
    }

    /// Left-nested conjunction of `parts`; `None` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    pub fn is_atom(&self) -> bool {
        matches!(
            self,
            Formula::Rel { .. }
                | Formula::Eq { .. }
                | Formula::Indep { .. }
                | Formula::Dep { .. }
                | Formula::Marg { .. }
                | Formula::Entropy { .. }
                | Formula::Cmp(_)
        )
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Formula::Rel { .. } | Formula::Eq { .. })
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::BoolNeg(f)
            | Formula::DotNeg(f)
            | Formula::Exists(_, f)
            | Formula::Forall(_, f)
            | Formula::Exists1(_, f)
            | Formula::Forall1(_, f) => vec![f],
            Formula::And(a, b) | Formula::SplitOr(a, b) | Formula::GlobalOr(a, b) => vec![a, b],
            _ => vec![],
        }
    }

    /// Rebuilds the node with each child replaced by `f(child)`.
    pub fn map_children(&self, f: &mut impl FnMut(&Formula) -> Formula) -> Formula {
        match self {
            Formula::BoolNeg(a) => Formula::BoolNeg(Box::new(f(a))),
            Formula::DotNeg(a) => Formula::DotNeg(Box::new(f(a))),
            Formula::Exists(v, a) => Formula::Exists(v.clone(), Box::new(f(a))),
            Formula::Forall(v, a) => Formula::Forall(v.clone(), Box::new(f(a))),
            Formula::Exists1(v, a) => Formula::Exists1(v.clone(), Box::new(f(a))),
            Formula::Forall1(v, a) => Formula::Forall1(v.clone(), Box::new(f(a))),
            Formula::And(a, b) => Formula::And(Box::new(f(a)), Box::new(f(b))),
            Formula::SplitOr(a, b) => Formula::SplitOr(Box::new(f(a)), Box::new(f(b))),
            Formula::GlobalOr(a, b) => Formula::GlobalOr(Box::new(f(a)), Box::new(f(b))),
            other => other.clone(),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children()
            .iter()
            .map(|c| c.node_count())
            .sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Any node satisfying `pred`?
    pub fn any(&self, pred: &impl Fn(&Formula) -> bool) -> bool {
        pred(self) || self.children().iter().any(|c| c.any(pred))
    }

    pub fn at_path(&self, path: &AstPath) -> Option<&Formula> {
        let mut node = self;
        for &i in &path.0 {
            node = node.children().get(i as usize).copied()?;
        }
        Some(node)
    }

    /// Every variable name occurring anywhere (free or bound).
    pub fn all_vars(&self) -> std::collections::BTreeSet<Var> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_all_vars(&mut out);
        out
    }

    fn collect_all_vars(&self, out: &mut std::collections::BTreeSet<Var>) {
        let mut buf = Vec::new();
        match self {
            Formula::Rel { args, .. } => {
                buf.extend(args.iter().filter_map(|t| t.as_var().map(String::from)));
            }
            Formula::Eq { left, right, .. } => {
                buf.extend(
                    [left, right]
                        .iter()
                        .filter_map(|t| t.as_var().map(String::from)),
                );
            }
            Formula::Indep { cond, left, right } => {
                buf.extend(cond.iter().chain(left).chain(right).cloned());
            }
            Formula::Dep { lhs, rhs }
            | Formula::Marg { lhs, rhs }
            | Formula::Entropy { lhs, rhs } => {
                buf.extend(lhs.iter().chain(rhs).cloned());
            }
            Formula::Cmp(cs) => {
                for c in cs.iter() {
                    c.collect_vars(&mut buf);
                }
            }
            Formula::Exists(v, _)
            | Formula::Forall(v, _)
            | Formula::Exists1(v, _)
            | Formula::Forall1(v, _) => {
                buf.push(v.clone());
            }
            _ => {}
        }
        out.extend(buf);
        for c in self.children() {
            c.collect_all_vars(out);
        }
    }
}

/// A variable name not in `used`, based on `base`.
pub fn fresh_var(base: &str, used: &std::collections::BTreeSet<Var>) -> Var {
    if !used.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|c| !used.contains(c))
        .expect("unbounded")
}
