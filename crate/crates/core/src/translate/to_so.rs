//! Translation of team formulas with conditional independence and Boolean
//! negation into second-order formulas over distributions, with one free
//! function variable `f` standing for the team.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::syntax::ast::{fresh_var, Formula, Term, Var};
use crate::syntax::dialect::free_vars;
use crate::syntax::rename::standardize_apart;

use super::ast::{NumTerm, SoFormula};

pub const TEAM_FUNCTION: &str = "f";

#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub formula: SoFormula,
    /// Argument order of the free function variable.
    pub vars: Vec<Var>,
}

/// Translates with the free variables in sorted order.
pub fn translate_so(f: &Formula) -> Result<Translation> {
    let vars: Vec<Var> = free_vars(f).into_iter().collect();
    translate_so_over(f, &vars)
}

/// Translates with `f` taking arguments `vars`, which must contain every
/// free variable.
pub fn translate_so_over(f: &Formula, vars: &[Var]) -> Result<Translation> {
    for v in free_vars(f) {
        if !vars.contains(&v) {
            return Err(Error::UnknownVariable(v));
        }
    }
    let reserved: BTreeSet<Var> = vars.iter().cloned().collect();
    let prepared = standardize_apart(f, &reserved);
    let mut used = prepared.all_vars();
    used.extend(reserved);
    let mut t = Translator { counter: 0, used };
    let formula = t.go(&prepared, vars, TEAM_FUNCTION)?;
    Ok(Translation {
        formula,
        vars: vars.to_vec(),
    })
}

/// Normal form of an independence atom: `(x, y, z)` with `x` disjoint from
/// `y` and `z`, and either `y = z` (dependence shape) or `y ∩ z = ∅`.
pub enum IndepShape {
    Disjoint {
        x: Vec<Var>,
        y: Vec<Var>,
        z: Vec<Var>,
    },
    Dependence {
        x: Vec<Var>,
        y: Vec<Var>,
    },
}

pub fn normalize_indep(cond: &[Var], left: &[Var], right: &[Var]) -> Result<IndepShape> {
    let mut seen = BTreeSet::new();
    let x: Vec<Var> = cond
        .iter()
        .filter(|v| seen.insert((*v).clone()))
        .cloned()
        .collect();
    let strip = |vs: &[Var]| -> Vec<Var> {
        let mut s = BTreeSet::new();
        vs.iter()
            .filter(|v| !x.contains(v) && s.insert((*v).clone()))
            .cloned()
            .collect()
    };
    let (y, z) = (strip(left), strip(right));
    let (ys, zs): (BTreeSet<&Var>, BTreeSet<&Var>) = (y.iter().collect(), z.iter().collect());
    if ys == zs {
        Ok(IndepShape::Dependence { x, y })
    } else if ys.is_disjoint(&zs) {
        Ok(IndepShape::Disjoint { x, y, z })
    } else {
        let atom = Formula::Indep {
            cond: cond.to_vec(),
            left: left.to_vec(),
            right: right.to_vec(),
        };
        Err(Error::NonDisjointAtom(atom.to_string()))
    }
}

struct Translator {
    counter: usize,
    used: BTreeSet<Var>,
}

/// `SUM_{v ∖ keep} f(v)`: the marginal of `f` on `keep`.
fn marginal(func: &str, v: &[Var], keep: &[&[Var]]) -> NumTerm {
    let kept: BTreeSet<&Var> = keep.iter().flat_map(|k| k.iter()).collect();
    let bound: Vec<Var> = v.iter().filter(|x| !kept.contains(x)).cloned().collect();
    NumTerm::sum(bound, NumTerm::app(func, v))
}

impl Translator {
    fn fresh_fn(&mut self) -> String {
        self.counter += 1;
        format!("g#{}", self.counter)
    }

    fn fresh_var(&mut self, base: &str) -> Var {
        let v = fresh_var(base, &self.used);
        self.used.insert(v.clone());
        v
    }

    fn go(&mut self, phi: &Formula, v: &[Var], func: &str) -> Result<SoFormula> {
        let zero_or = |lit: SoFormula| {
            SoFormula::forall_all(
                v,
                SoFormula::or(SoFormula::num_eq(NumTerm::app(func, v), NumTerm::Zero), lit),
            )
        };
        match phi {
            Formula::Rel {
                name,
                args,
                negated,
            } => Ok(zero_or(SoFormula::Rel {
                name: name.clone(),
                args: args.clone(),
                negated: *negated,
            })),
            Formula::Eq {
                left,
                right,
                negated,
            } => Ok(zero_or(SoFormula::Eq {
                left: left.clone(),
                right: right.clone(),
                negated: *negated,
            })),
            Formula::Indep { cond, left, right } => match normalize_indep(cond, left, right)? {
                IndepShape::Disjoint { x, y, z } => {
                    let lhs =
                        NumTerm::mul(marginal(func, v, &[&x, &y]), marginal(func, v, &[&x, &z]));
                    let rhs =
                        NumTerm::mul(marginal(func, v, &[&x, &y, &z]), marginal(func, v, &[&x]));
                    let outer: Vec<Var> = x.iter().chain(&y).chain(&z).cloned().collect();
                    Ok(SoFormula::forall_all(&outer, SoFormula::num_eq(lhs, rhs)))
                }
                IndepShape::Dependence { x, y } => {
                    let xy = marginal(func, v, &[&x, &y]);
                    let body = SoFormula::or(
                        SoFormula::num_eq(xy.clone(), NumTerm::Zero),
                        SoFormula::num_eq(xy, marginal(func, v, &[&x])),
                    );
                    let outer: Vec<Var> = x.iter().chain(&y).cloned().collect();
                    Ok(SoFormula::forall_all(&outer, body))
                }
            },
            Formula::BoolNeg(b) => Ok(self.go(b, v, func)?.negate()),
            Formula::And(a, b) => Ok(SoFormula::and(self.go(a, v, func)?, self.go(b, v, func)?)),
            Formula::SplitOr(a, b) => {
                let direct = SoFormula::or(self.go(a, v, func)?, self.go(b, v, func)?);
                let g: Vec<String> = (0..4).map(|_| self.fresh_fn()).collect();
                let x = self.fresh_var("x");
                let (l, r) = (Term::Const("zero".into()), Term::Const("one".into()));
                let mut vx: Vec<Term> = v.iter().map(|w| Term::Var(w.clone())).collect();
                vx.push(Term::Var(x.clone()));
                let with_last = |last: Term| {
                    let mut args: Vec<Term> = v.iter().map(|w| Term::Var(w.clone())).collect();
                    args.push(last);
                    args
                };
                let support = SoFormula::forall_all(
                    v,
                    SoFormula::Forall(
                        x.clone(),
                        Box::new(SoFormula::or(
                            SoFormula::or(
                                SoFormula::Eq {
                                    left: Term::Var(x.clone()),
                                    right: l.clone(),
                                    negated: false,
                                },
                                SoFormula::Eq {
                                    left: Term::Var(x.clone()),
                                    right: r.clone(),
                                    negated: false,
                                },
                            ),
                            SoFormula::and(
                                SoFormula::num_eq(
                                    NumTerm::App(g[0].clone(), vec![Term::Var(x.clone())]),
                                    NumTerm::Zero,
                                ),
                                SoFormula::num_eq(
                                    NumTerm::App(g[3].clone(), vx.clone()),
                                    NumTerm::Zero,
                                ),
                            ),
                        )),
                    ),
                );
                let slices = SoFormula::forall_all(
                    v,
                    SoFormula::and(
                        SoFormula::num_eq(
                            NumTerm::App(g[3].clone(), with_last(l.clone())),
                            NumTerm::mul(
                                NumTerm::app(&g[1], v),
                                NumTerm::App(g[0].clone(), vec![l]),
                            ),
                        ),
                        SoFormula::num_eq(
                            NumTerm::App(g[3].clone(), with_last(r.clone())),
                            NumTerm::mul(
                                NumTerm::app(&g[2], v),
                                NumTerm::App(g[0].clone(), vec![r]),
                            ),
                        ),
                    ),
                );
                let total = SoFormula::forall_all(
                    v,
                    SoFormula::num_eq(
                        NumTerm::Sum(vec![x.clone()], Box::new(NumTerm::App(g[3].clone(), vx))),
                        NumTerm::app(func, v),
                    ),
                );
                let left = self.go(a, v, &g[1])?;
                let right = self.go(b, v, &g[2])?;
                let body = SoFormula::and(
                    SoFormula::and(SoFormula::and(SoFormula::and(support, slices), total), left),
                    right,
                );
                let k = v.len();
                let quantified = SoFormula::exists_fn(
                    &g[0],
                    1,
                    SoFormula::exists_fn(
                        &g[1],
                        k,
                        SoFormula::exists_fn(&g[2], k, SoFormula::exists_fn(&g[3], k + 1, body)),
                    ),
                );
                Ok(SoFormula::or(direct, quantified))
            }
            Formula::Exists(x, b) | Formula::Forall(x, b) => {
                let g = self.fresh_fn();
                let mut vx = v.to_vec();
                vx.push(x.clone());
                let marg = SoFormula::num_eq(
                    NumTerm::Sum(vec![x.clone()], Box::new(NumTerm::app(&g, &vx))),
                    NumTerm::app(func, v),
                );
                let constraint = if matches!(phi, Formula::Forall(..)) {
                    let y = self.fresh_var("y");
                    let mut vy = v.to_vec();
                    vy.push(y.clone());
                    let equal = SoFormula::Forall(
                        x.clone(),
                        Box::new(SoFormula::Forall(
                            y,
                            Box::new(SoFormula::num_eq(
                                NumTerm::app(&g, &vx),
                                NumTerm::app(&g, &vy),
                            )),
                        )),
                    );
                    SoFormula::forall_all(v, SoFormula::and(equal, marg))
                } else {
                    SoFormula::forall_all(v, marg)
                };
                let body = self.go(b, &vx, &g)?;
                Ok(SoFormula::exists_fn(
                    &g,
                    vx.len(),
                    SoFormula::and(constraint, body),
                ))
            }
            Formula::Dep { .. } | Formula::Marg { .. } | Formula::Entropy { .. } => {
                Err(Error::UnsupportedAtom(phi.to_string()))
            }
            other => Err(Error::WrongDialect {
                expected: "FO_ATOMS_NEG".into(),
                found: other.to_string(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::parse;

    fn tr(text: &str) -> String {
        translate_so(&parse(text).unwrap())
            .unwrap()
            .formula
            .to_string()
    }

    #[test]
    fn literal_cases() {
        assert_eq!(tr("R(x)"), "forall x. f(x) = 0 | R(x)");
        assert_eq!(tr("!R(x, y)"), "forall x. forall y. f(x, y) = 0 | !R(x, y)");
    }

    #[test]
    fn independence_cases() {
        assert_eq!(
            tr("indep(x ; y ; z)"),
            "forall x. forall y. forall z. SUM[z] (f(x, y, z)) * SUM[y] (f(x, y, z)) = f(x, y, z) * SUM[y z] (f(x, y, z))"
        );
        assert_eq!(
            tr("indep(x ; y x ; y)"),
            "forall x. forall y. f(x, y) = 0 | f(x, y) = SUM[y] (f(x, y))"
        );
        assert!(matches!(
            translate_so(&parse("indep( ; x y ; y z)").unwrap()),
            Err(Error::NonDisjointAtom(_))
        ));
        assert!(matches!(
            translate_so(&parse("dep(x ; y)").unwrap()),
            Err(Error::UnsupportedAtom(_))
        ));
    }

    #[test]
    fn negation_is_pushed_to_atoms() {
        assert_eq!(tr("~R(x)"), "exists x. f(x) != 0 & !R(x)");
    }

    #[test]
    fn quantifier_cases() {
        assert_eq!(
            tr("exists y. R(y)"),
            "Eg#1:1. SUM[y] (g#1(y)) = f() & (forall y. g#1(y) = 0 | R(y))"
        );
        let t = tr("forall x. R(x)");
        assert!(
            t.starts_with("Eg#1:1. (forall x. forall y. g#1(x) = g#1(y)) & SUM[x] (g#1(x)) = f()"),
            "{t}"
        );
    }

    #[test]
    fn one_free_function() {
        for text in [
            "R(x) \\/ indep( ; x ; y)",
            "exists z. ~indep(z ; x ; y)",
            "forall u. x = u",
        ] {
            let t = translate_so(&parse(text).unwrap()).unwrap();
            let free = t.formula.free_functions();
            assert_eq!(free.len(), 1, "{text}: {free:?}");
            assert_eq!(free[0], ("f".to_string(), t.vars.len()));
        }
    }
}
