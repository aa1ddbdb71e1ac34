use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Rational;
use crate::structure::{Elem, Structure};
use crate::syntax::ast::{eval_literal_eq, eval_literal_rel, eval_term, Var};
use crate::team::WeightedTeam;

use super::ast::{NumTerm, SoFormula};

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionTable {
    pub name: String,
    pub arity: usize,
    /// Missing tuples map to zero.
    pub values: BTreeMap<Vec<Elem>, Rational>,
    pub distribution: bool,
}

impl FunctionTable {
    pub fn get(&self, args: &[Elem]) -> Rational {
        self.values
            .get(args)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }
}

/// Table of a normalized team, with arguments in the team's variable order.
pub fn team_to_table(team: &WeightedTeam, name: &str) -> Result<FunctionTable> {
    if !team.is_normalized() {
        return Err(Error::NotNormalized(crate::scalar::format_rational(
            &team.total(),
        )));
    }
    Ok(FunctionTable {
        name: name.to_string(),
        arity: team.vars().len(),
        values: team
            .rows()
            .filter(|(_, w)| !w.is_zero())
            .map(|(t, w)| (t.clone(), w.clone()))
            .collect(),
        distribution: true,
    })
}

pub type Tables = BTreeMap<String, FunctionTable>;

/// Evaluates a formula without function quantifiers, exactly.
pub fn eval_so(st: &Structure, tables: &Tables, f: &SoFormula) -> Result<bool> {
    Ev { st, tables }.formula(f, &mut BTreeMap::new())
}

struct Ev<'a> {
    st: &'a Structure,
    tables: &'a Tables,
}

impl Ev<'_> {
    fn formula(&self, f: &SoFormula, s: &mut BTreeMap<Var, Elem>) -> Result<bool> {
        match f {
            SoFormula::NumEq {
                left,
                right,
                negated,
            } => Ok((self.term(left, s)? == self.term(right, s)?) != *negated),
            SoFormula::Rel {
                name,
                args,
                negated,
            } => eval_literal_rel(name, args, *negated, &*s, self.st),
            SoFormula::Eq {
                left,
                right,
                negated,
            } => eval_literal_eq(left, right, *negated, &*s, self.st),
            SoFormula::And(a, b) => Ok(self.formula(a, s)? && self.formula(b, s)?),
            SoFormula::Or(a, b) => Ok(self.formula(a, s)? || self.formula(b, s)?),
            SoFormula::Exists(x, b) | SoFormula::Forall(x, b) => {
                let want = matches!(f, SoFormula::Exists(..));
                let saved = s.get(x).copied();
                let mut result = !want;
                for a in self.st.elements() {
                    s.insert(x.clone(), a);
                    if self.formula(b, s)? == want {
                        result = want;
                        break;
                    }
                }
                restore(s, x, saved);
                Ok(result)
            }
            SoFormula::ExistsFn(..) | SoFormula::ForallFn(..) => {
                Err(Error::FunctionQuantifierUnsupported)
            }
        }
    }

    fn term(&self, t: &NumTerm, s: &mut BTreeMap<Var, Elem>) -> Result<Rational> {
        Ok(match t {
            NumTerm::Zero => Rational::zero(),
            NumTerm::One => Rational::one(),
            NumTerm::App(name, args) => {
                let table = self
                    .tables
                    .get(name)
                    .ok_or_else(|| Error::MissingTable(name.clone()))?;
                if table.arity != args.len() {
                    return Err(Error::ArityMismatch {
                        name: name.clone(),
                        expected: table.arity,
                        found: args.len(),
                    });
                }
                let vals = args
                    .iter()
                    .map(|a| eval_term(a, &*s, self.st))
                    .collect::<Result<Vec<_>>>()?;
                table.get(&vals)
            }
            NumTerm::Mul(a, b) => self.term(a, s)? * self.term(b, s)?,
            NumTerm::Add(a, b) => self.term(a, s)? + self.term(b, s)?,
            NumTerm::Sum(vs, body) => {
                let saved: Vec<Option<Elem>> = vs.iter().map(|v| s.get(v).copied()).collect();
                let mut acc = Rational::zero();
                for tuple in self.st.tuples(vs.len()) {
                    for (v, a) in vs.iter().zip(&tuple) {
                        s.insert(v.clone(), *a);
                    }
                    acc += self.term(body, s)?;
                }
                for (v, old) in vs.iter().zip(saved) {
                    restore(s, v, old);
                }
                acc
            }
            NumTerm::Log(_) => {
                return Err(Error::Unsupported("log terms have no exact value".into()))
            }
        })
    }
}

fn restore(s: &mut BTreeMap<Var, Elem>, v: &Var, old: Option<Elem>) {
    match old {
        Some(a) => s.insert(v.clone(), a),
        None => s.remove(v),
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::translate::parse::parse_so;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn tables_and_sums() {
        let st = Structure::new(["a", "b"]).unwrap();
        let team =
            WeightedTeam::from_rows(["x"], [(vec![0], q(1, 3)), (vec![1], q(2, 3))]).unwrap();
        let table = team_to_table(&team, "f").unwrap();
        assert_eq!(table.get(&[1]), q(2, 3));
        let tables = Tables::from([("f".to_string(), table)]);
        assert!(eval_so(&st, &tables, &parse_so("SUM[x] (f(x)) = 1").unwrap()).unwrap());
        assert!(eval_so(&st, &tables, &parse_so("forall x. f(x) = f(x)").unwrap()).unwrap());
        assert!(!eval_so(
            &st,
            &tables,
            &parse_so("forall x. f(x) * f(x) = f(x)").unwrap()
        )
        .unwrap());
        assert!(matches!(
            eval_so(&st, &tables, &parse_so("f(x, x) = 0").unwrap()),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(matches!(
            eval_so(&st, &tables, &parse_so("Eg:1. g(x) = 0").unwrap()),
            Err(Error::FunctionQuantifierUnsupported)
        ));
        assert!(matches!(
            eval_so(&st, &tables, &parse_so("h() = 0").unwrap()),
            Err(Error::MissingTable(_))
        ));
    }

    #[test]
    fn unit_and_missing_rows() {
        let unit = team_to_table(&WeightedTeam::unit(), "f").unwrap();
        assert_eq!((unit.arity, unit.get(&[])), (0, q(1, 1)));
        let team = WeightedTeam::from_rows(["x"], [(vec![0], q(1, 1))]).unwrap();
        assert_eq!(team_to_table(&team, "f").unwrap().get(&[1]), q(0, 1));
        let heavy = WeightedTeam::from_rows(["x"], [(vec![0], q(2, 1))]).unwrap();
        assert!(matches!(
            team_to_table(&heavy, "f"),
            Err(Error::NotNormalized(_))
        ));
    }
}
