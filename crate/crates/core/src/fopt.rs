//! Evaluation of FOPT formulas on weighted teams, and Tarski evaluation of
//! classical first-order formulas.

use std::collections::BTreeMap;

use crate::atoms::eval_atom;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::structure::{Elem, Structure};
use crate::syntax::ast::{eval_literal_eq, eval_literal_rel, AstPath, Condition, Formula};
use crate::syntax::dialect::{dialect_of, free_vars, require_sentence, Dialect};
use crate::syntax::star::star_translate;
use crate::team::WeightedTeam;

/// One evaluated node.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceNode<W: Scalar> {
    pub path: AstPath,
    pub value: bool,
    /// For comparison atoms: `|X_{δ0∧δ1}|`, `|X_{δ3}|`, `|X_{δ2∧δ3}|`, `|X_{δ1}|`.
    pub weights: Option<[W; 4]>,
    /// For `E1`/`A1`: the element tried in each child.
    pub element: Option<Elem>,
    pub children: Vec<TraceNode<W>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoptVerdict<W: Scalar> {
    pub value: bool,
    pub trace: Option<TraceNode<W>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FoptConfig {
    /// Record an evaluation trace down to this depth (`None`: no trace).
    pub trace_depth: Option<usize>,
}

pub fn eval_fopt<W: Scalar>(
    st: &Structure,
    team: &WeightedTeam<W>,
    f: &Formula,
) -> Result<FoptVerdict<W>> {
    eval_fopt_with(st, team, f, &FoptConfig::default())
}

pub fn eval_fopt_with<W: Scalar>(
    st: &Structure,
    team: &WeightedTeam<W>,
    f: &Formula,
    cfg: &FoptConfig,
) -> Result<FoptVerdict<W>> {
    let d = dialect_of(f)?;
    if d != Dialect::Fopt && d != Dialect::Fo {
        return Err(Error::WrongDialect {
            expected: "FOPT".into(),
            found: d.to_string(),
        });
    }
    if d == Dialect::Fo
        && f.any(&|g| {
            matches!(
                g,
                Formula::SplitOr(..) | Formula::Exists(..) | Formula::Forall(..)
            )
        })
    {
        return Err(Error::WrongDialect {
            expected: "FOPT".into(),
            found: d.to_string(),
        });
    }
    for v in free_vars(f) {
        team.var_index(&v)?;
    }
    let mut ev = Evaluator {
        st,
        trace_depth: cfg.trace_depth,
    };
    let (value, trace) = ev.eval(team, f, AstPath::root(), 0)?;
    Ok(FoptVerdict { value, trace })
}

struct Evaluator<'a> {
    st: &'a Structure,
    trace_depth: Option<usize>,
}

impl Evaluator<'_> {
    fn tracing(&self, depth: usize) -> bool {
        self.trace_depth.is_some_and(|d| depth < d)
    }

    fn eval<W: Scalar>(
        &mut self,
        team: &WeightedTeam<W>,
        f: &Formula,
        path: AstPath,
        depth: usize,
    ) -> Result<(bool, Option<TraceNode<W>>)> {
        let trace = self.tracing(depth);
        let node = |value, weights, element, children| {
            trace.then(|| TraceNode {
                path: path.clone(),
                value,
                weights,
                element,
                children,
            })
        };
        match f {
            Formula::Rel { .. } | Formula::Eq { .. } => {
                let v = eval_atom(self.st, team, f)?;
                Ok((v, node(v, None, None, vec![])))
            }
            Formula::Cmp(cs) => {
                let w01 = team.weight(self.st, &Condition::and(cs[0].clone(), cs[1].clone()))?;
                let w3 = team.weight(self.st, &cs[3])?;
                let w23 = team.weight(self.st, &Condition::and(cs[2].clone(), cs[3].clone()))?;
                let w1 = team.weight(self.st, &cs[1])?;
                let lhs = w01.clone() * w3.clone();
                let rhs = w23.clone() * w1.clone();
                let v = lhs < rhs || lhs.approx_eq(&rhs);
                Ok((v, node(v, Some([w01, w3, w23, w1]), None, vec![])))
            }
            Formula::DotNeg(b) => {
                let (bv, bt) = self.eval(team, b, path.child(0), depth + 1)?;
                let v = !bv || team.is_empty();
                Ok((v, node(v, None, None, bt.into_iter().collect())))
            }
            Formula::And(a, b) | Formula::GlobalOr(a, b) => {
                let is_and = matches!(f, Formula::And(..));
                let (av, at) = self.eval(team, a, path.child(0), depth + 1)?;
                let mut children: Vec<_> = at.into_iter().collect();
                let v = if av != is_and && !trace {
                    av
                } else {
                    let (bv, bt) = self.eval(team, b, path.child(1), depth + 1)?;
                    children.extend(bt);
                    if is_and {
                        av && bv
                    } else {
                        av || bv
                    }
                };
                Ok((v, node(v, None, None, children)))
            }
            Formula::Exists1(x, b) | Formula::Forall1(x, b) => {
                let want = matches!(f, Formula::Exists1(..));
                let mut children = Vec::new();
                let mut v = !want;
                for a in self.st.elements() {
                    let sub = team.duplicate(x, &[a])?;
                    let (bv, bt) = self.eval(&sub, b, path.child(0), depth + 1)?;
                    if let Some(mut t) = bt {
                        t.element = Some(a);
                        children.push(t);
                    }
                    if bv == want {
                        v = want;
                        if !trace {
                            break;
                        }
                    }
                }
                Ok((v, node(v, None, None, children)))
            }
            other => Err(Error::WrongDialect {
                expected: "FOPT".into(),
                found: other.to_string(),
            }),
        }
    }
}

/// Tarski evaluation of a classical first-order formula under one assignment.
pub fn eval_fo(st: &Structure, s: &BTreeMap<String, Elem>, f: &Formula) -> Result<bool> {
    match f {
        Formula::Rel {
            name,
            args,
            negated,
        } => eval_literal_rel(name, args, *negated, s, st),
        Formula::Eq {
            left,
            right,
            negated,
        } => eval_literal_eq(left, right, *negated, s, st),
        Formula::And(a, b) => Ok(eval_fo(st, s, a)? && eval_fo(st, s, b)?),
        Formula::SplitOr(a, b) => Ok(eval_fo(st, s, a)? || eval_fo(st, s, b)?),
        Formula::Exists(x, b) | Formula::Forall(x, b) => {
            let want = matches!(f, Formula::Exists(..));
            let mut s2 = s.clone();
            for a in st.elements() {
                s2.insert(x.clone(), a);
                if eval_fo(st, &s2, b)? == want {
                    return Ok(want);
                }
            }
            Ok(!want)
        }
        other => Err(Error::WrongDialect {
            expected: "FO".into(),
            found: other.to_string(),
        }),
    }
}

/// Decides an FOPT sentence through its classical translation.
pub fn check_sentence_fopt(st: &Structure, f: &Formula) -> Result<bool> {
    require_sentence(f)?;
    let classical = star_translate(f)?;
    eval_fo(st, &BTreeMap::new(), &classical)
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

    #[test]
    fn comparison_by_hand() {
        let st = Structure::new(["a", "b"]).unwrap();
        let mut st = st;
        st.set_constant("a", "a").unwrap();
        st.set_constant("b", "b").unwrap();
        let x = WeightedTeam::from_rows(["x"], [(vec![0], q(1, 3)), (vec![1], q(2, 3))]).unwrap();
        let f = parse("cmp(x = @a | x = x <= x = @b | x = x)").unwrap();
        assert!(eval_fopt(&st, &x, &f).unwrap().value);
        let g = parse("cmp(x = @b | x = x <= x = @a | x = x)").unwrap();
        assert!(!eval_fopt(&st, &x, &g).unwrap().value);
        let traced = eval_fopt_with(
            &st,
            &x,
            &f,
            &FoptConfig {
                trace_depth: Some(4),
            },
        )
        .unwrap();
        assert_eq!(
            traced.trace.unwrap().weights.unwrap(),
            [q(1, 3), q(1, 1), q(2, 3), q(1, 1)]
        );
    }

    #[test]
    fn dot_negation_on_empty_team() {
        let st = Structure::with_size(2).unwrap();
        let empty = WeightedTeam::<Rational>::empty(["x"]).unwrap();
        for text in [
            "not x = x",
            "not x != x",
            "not cmp(x = x | x = x <= x != x | x = x)",
        ] {
            assert!(
                eval_fopt(&st, &empty, &parse(text).unwrap()).unwrap().value,
                "{text}"
            );
        }
    }

    #[test]
    fn sentences_both_routes() {
        let mut st = Structure::new(["a", "b"]).unwrap();
        st.add_relation("R", 1, [vec!["a"]]).unwrap();
        let unit = WeightedTeam::<Rational>::unit();
        for (text, expected) in [
            ("E1 x. R(x)", true),
            ("A1 x. not R(x)", false),
            ("A1 x. R(x) || not R(x)", true),
        ] {
            let f = parse(text).unwrap();
            assert_eq!(check_sentence_fopt(&st, &f).unwrap(), expected, "{text}");
            assert_eq!(eval_fopt(&st, &unit, &f).unwrap().value, expected, "{text}");
        }
        assert!(matches!(
            check_sentence_fopt(&st, &parse("R(x)").unwrap()),
            Err(Error::OpenFormula(_))
        ));
    }

    #[test]
    fn tarski() {
        let mut st = Structure::new(["a", "b"]).unwrap();
        st.add_relation("R", 1, [vec!["a"]]).unwrap();
        let s = BTreeMap::from([("x".to_string(), 1)]);
        assert!(eval_fo(&st, &s, &parse("x = x").unwrap()).unwrap());
        assert!(!eval_fo(&st, &s, &parse("R(x)").unwrap()).unwrap());
        assert!(eval_fo(&st, &s, &parse("forall y. exists x. x = y").unwrap()).unwrap());
        assert!(matches!(
            eval_fo(&st, &s, &parse("R(z)").unwrap()),
            Err(Error::UnboundVariable(_))
        ));
    }

    #[test]
    fn rejects_team_formulas() {
        let st = Structure::with_size(2).unwrap();
        let t = WeightedTeam::<Rational>::unit();
        assert!(eval_fopt(&st, &t, &parse("exists x. x = x").unwrap()).is_err());
    }
}
