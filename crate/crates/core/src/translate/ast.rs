//! Second-order formulas over the reals with numeric function terms.
//!
//! Text format:
//! ```text
//! forall x. SUM[y z] (f(x, y, z)) * g(x) = f(x, @zero, @one) | R(x)
//! Eg#1:2. Af:1. !(g#1(x, y) = 0)
//! ```

use std::fmt;

use crate::syntax::ast::{Term, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NumTerm {
    Zero,
    One,
    App(String, Vec<Term>),
    Mul(Box<NumTerm>, Box<NumTerm>),
    Add(Box<NumTerm>, Box<NumTerm>),
    Sum(Vec<Var>, Box<NumTerm>),
    Log(Box<NumTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SoFormula {
    NumEq {
        left: NumTerm,
        right: NumTerm,
        negated: bool,
    },
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
    And(Box<SoFormula>, Box<SoFormula>),
    Or(Box<SoFormula>, Box<SoFormula>),
    Exists(Var, Box<SoFormula>),
    Forall(Var, Box<SoFormula>),
    /// Function quantifier with the arity of the bound symbol.
    ExistsFn(String, usize, Box<SoFormula>),
    ForallFn(String, usize, Box<SoFormula>),
}

impl NumTerm {
    pub fn app(name: &str, args: &[Var]) -> Self {
        NumTerm::App(
            name.to_string(),
            args.iter().map(|a| Term::Var(a.clone())).collect(),
        )
    }

    pub fn mul(a: NumTerm, b: NumTerm) -> Self {
        NumTerm::Mul(Box::new(a), Box::new(b))
    }

    pub fn sum(vars: Vec<Var>, t: NumTerm) -> Self {
        if vars.is_empty() {
            t
        } else {
            NumTerm::Sum(vars, Box::new(t))
        }
    }

    fn level(&self) -> u8 {
        match self {
            NumTerm::Add(..) => 1,
            NumTerm::Mul(..) => 2,
            _ => 3,
        }
    }

    pub(crate) fn functions(&self, out: &mut Vec<(String, usize)>) {
        match self {
            NumTerm::App(f, args) => out.push((f.clone(), args.len())),
            NumTerm::Mul(a, b) | NumTerm::Add(a, b) => {
                a.functions(out);
                b.functions(out);
            }
            NumTerm::Sum(_, t) | NumTerm::Log(t) => t.functions(out),
            NumTerm::Zero | NumTerm::One => {}
        }
    }
}

impl SoFormula {
    pub fn num_eq(left: NumTerm, right: NumTerm) -> Self {
        SoFormula::NumEq {
            left,
            right,
            negated: false,
        }
    }

    pub fn and(a: SoFormula, b: SoFormula) -> Self {
        SoFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: SoFormula, b: SoFormula) -> Self {
        SoFormula::Or(Box::new(a), Box::new(b))
    }

    /// `∀v₁…∀vₙ body`.
    pub fn forall_all(vars: &[Var], body: SoFormula) -> Self {
        vars.iter()
            .rev()
            .fold(body, |acc, v| SoFormula::Forall(v.clone(), Box::new(acc)))
    }

    pub fn exists_fn(name: &str, arity: usize, body: SoFormula) -> Self {
        SoFormula::ExistsFn(name.to_string(), arity, Box::new(body))
    }

    /// Negation pushed down to the atoms.
    pub fn negate(&self) -> Self {
        match self {
            SoFormula::NumEq {
                left,
                right,
                negated,
            } => SoFormula::NumEq {
                left: left.clone(),
                right: right.clone(),
                negated: !negated,
            },
            SoFormula::Rel {
                name,
                args,
                negated,
            } => SoFormula::Rel {
                name: name.clone(),
                args: args.clone(),
                negated: !negated,
            },
            SoFormula::Eq {
                left,
                right,
                negated,
            } => SoFormula::Eq {
                left: left.clone(),
                right: right.clone(),
                negated: !negated,
            },
            SoFormula::And(a, b) => SoFormula::or(a.negate(), b.negate()),
            SoFormula::Or(a, b) => SoFormula::and(a.negate(), b.negate()),
            SoFormula::Exists(v, b) => SoFormula::Forall(v.clone(), Box::new(b.negate())),
            SoFormula::Forall(v, b) => SoFormula::Exists(v.clone(), Box::new(b.negate())),
            SoFormula::ExistsFn(g, n, b) => {
                SoFormula::ForallFn(g.clone(), *n, Box::new(b.negate()))
            }
            SoFormula::ForallFn(g, n, b) => {
                SoFormula::ExistsFn(g.clone(), *n, Box::new(b.negate()))
            }
        }
    }

    /// Function symbols occurring free, with the arities they are used at.
    pub fn free_functions(&self) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        self.collect_free_functions(&mut Vec::new(), &mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_free_functions(&self, bound: &mut Vec<String>, out: &mut Vec<(String, usize)>) {
        let mut keep = |t: &NumTerm, bound: &Vec<String>| {
            let mut fs = Vec::new();
            t.functions(&mut fs);
            out.extend(fs.into_iter().filter(|(f, _)| !bound.contains(f)));
        };
        match self {
            SoFormula::NumEq { left, right, .. } => {
                keep(left, bound);
                keep(right, bound);
            }
            SoFormula::Rel { .. } | SoFormula::Eq { .. } => {}
            SoFormula::And(a, b) | SoFormula::Or(a, b) => {
                a.collect_free_functions(bound, out);
                b.collect_free_functions(bound, out);
            }
            SoFormula::Exists(_, b) | SoFormula::Forall(_, b) => {
                b.collect_free_functions(bound, out)
            }
            SoFormula::ExistsFn(g, _, b) | SoFormula::ForallFn(g, _, b) => {
                bound.push(g.clone());
                b.collect_free_functions(bound, out);
                bound.pop();
            }
        }
    }

    pub fn has_function_quantifier(&self) -> bool {
        match self {
            SoFormula::ExistsFn(..) | SoFormula::ForallFn(..) => true,
            SoFormula::And(a, b) | SoFormula::Or(a, b) => {
                a.has_function_quantifier() || b.has_function_quantifier()
            }
            SoFormula::Exists(_, b) | SoFormula::Forall(_, b) => b.has_function_quantifier(),
            _ => false,
        }
    }

    fn level(&self) -> u8 {
        match self {
            SoFormula::Or(..) => 1,
            SoFormula::And(..) => 2,
            SoFormula::Exists(..)
            | SoFormula::Forall(..)
            | SoFormula::ExistsFn(..)
            | SoFormula::ForallFn(..) => 0,
            _ => 3,
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

fn num_operand(f: &mut fmt::Formatter<'_>, t: &NumTerm, min: u8) -> fmt::Result {
    if t.level() < min {
        write!(f, "({t})")
    } else {
        write!(f, "{t}")
    }
}

impl fmt::Display for NumTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumTerm::Zero => f.write_str("0"),
            NumTerm::One => f.write_str("1"),
            NumTerm::App(g, args) => {
                write!(f, "{g}(")?;
                write_args(f, args)?;
                f.write_str(")")
            }
            NumTerm::Mul(a, b) | NumTerm::Add(a, b) => {
                let (lvl, op) = if matches!(self, NumTerm::Mul(..)) {
                    (2, " * ")
                } else {
                    (1, " + ")
                };
                num_operand(f, a, lvl)?;
                f.write_str(op)?;
                num_operand(f, b, lvl + 1)
            }
            NumTerm::Sum(vs, t) => write!(f, "SUM[{}] ({t})", vs.join(" ")),
            NumTerm::Log(t) => write!(f, "log({t})"),
        }
    }
}

fn operand(f: &mut fmt::Formatter<'_>, x: &SoFormula, min: u8) -> fmt::Result {
    if x.level() < min {
        write!(f, "({x})")
    } else {
        write!(f, "{x}")
    }
}

impl fmt::Display for SoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SoFormula::NumEq {
                left,
                right,
                negated,
            } => {
                write!(f, "{left} {} {right}", if *negated { "!=" } else { "=" })
            }
            SoFormula::Rel {
                name,
                args,
                negated,
            } => {
                if *negated {
                    f.write_str("!")?;
                }
                write!(f, "{name}(")?;
                write_args(f, args)?;
                f.write_str(")")
            }
            SoFormula::Eq {
                left,
                right,
                negated,
            } => {
                write!(f, "{left} {} {right}", if *negated { "!=" } else { "=" })
            }
            SoFormula::And(a, b) | SoFormula::Or(a, b) => {
                let (lvl, op) = if matches!(self, SoFormula::And(..)) {
                    (2, " & ")
                } else {
                    (1, " | ")
                };
                operand(f, a, lvl)?;
                f.write_str(op)?;
                operand(f, b, lvl + 1)
            }
            SoFormula::Exists(v, b) => write!(f, "exists {v}. {b}"),
            SoFormula::Forall(v, b) => write!(f, "forall {v}. {b}"),
            SoFormula::ExistsFn(g, n, b) => write!(f, "E{g}:{n}. {b}"),
            SoFormula::ForallFn(g, n, b) => write!(f, "A{g}:{n}. {b}"),
        }
    }
}
