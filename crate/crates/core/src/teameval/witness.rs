//! Witnesses for split disjunctions and existential quantifiers.
//!
//! A witness maps AST paths to node witnesses. Every node is evaluated on a
//! single team, so the path identifies the team the witness applies to.
//! Rows are indexed by position in the support of that team restricted to
//! the free variables of the node (ascending tuple order).
//!
//! JSON form:
//! ```json
//! { "/":   { "k": "1/2", "yw": ["1", "0"], "zw": ["0", "1"] },
//!   "/0":  { "F": { "0": { "a": "1/2", "b": "1/2" } } } }
//! ```

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{Map, Value};

use crate::atoms::AtomConfig;
use crate::error::{Error, Result};
use crate::instance::parse_weight;
use crate::scalar::{format_rational, Rational};
use crate::structure::{Elem, Structure};
use crate::syntax::ast::{AstPath, Formula};
use crate::syntax::dialect::{free_vars, needs_search};
use crate::team::{check_distribution, WeightedTeam};

use super::exact;
use super::{atom_holds, localize};

type Team = WeightedTeam<Rational>;

#[derive(Debug, Clone, PartialEq)]
pub enum NodeWitness {
    /// `X = Y ⊔_k Z` with `Y = k·|X|·yw` and `Z = (1−k)·|X|·zw`.
    Split {
        k: Rational,
        yw: Vec<Rational>,
        zw: Vec<Rational>,
    },
    /// Distribution `F(s)` per support row index.
    Exists {
        f: BTreeMap<usize, BTreeMap<Elem, Rational>>,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Witness {
    pub nodes: BTreeMap<AstPath, NodeWitness>,
}

impl Witness {
    pub fn to_json(&self, st: &Structure) -> Value {
        let mut out = Map::new();
        for (path, node) in &self.nodes {
            let v = match node {
                NodeWitness::Split { k, yw, zw } => {
                    let list = |v: &[Rational]| {
                        Value::Array(
                            v.iter()
                                .map(|r| Value::String(format_rational(r)))
                                .collect(),
                        )
                    };
                    serde_json::json!({ "k": format_rational(k), "yw": list(yw), "zw": list(zw) })
                }
                NodeWitness::Exists { f } => {
                    let mut rows = Map::new();
                    for (i, dist) in f {
                        let d: Map<String, Value> = dist
                            .iter()
                            .map(|(e, p)| {
                                (st.name(*e).to_string(), Value::String(format_rational(p)))
                            })
                            .collect();
                        rows.insert(i.to_string(), Value::Object(d));
                    }
                    serde_json::json!({ "F": rows })
                }
            };
            out.insert(path.to_string(), v);
        }
        Value::Object(out)
    }

    pub fn from_json(st: &Structure, value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::WitnessShape("witness must be an object".into()))?;
        let mut nodes = BTreeMap::new();
        for (key, v) in obj {
            let path = AstPath::parse(key)
                .ok_or_else(|| Error::WitnessShape(format!("bad path `{key}`")))?;
            let node = v
                .as_object()
                .ok_or_else(|| Error::WitnessShape(format!("{key}: expected an object")))?;
            let w = if let Some(f) = node.get("F") {
                let f = f
                    .as_object()
                    .ok_or_else(|| Error::WitnessShape(format!("{key}: F must be an object")))?;
                let mut rows = BTreeMap::new();
                for (i, dist) in f {
                    let idx: usize = i
                        .parse()
                        .map_err(|_| Error::WitnessShape(format!("{key}: bad row index `{i}`")))?;
                    let dist = dist.as_object().ok_or_else(|| {
                        Error::WitnessShape(format!("{key}: row {i} must be an object"))
                    })?;
                    let mut d = BTreeMap::new();
                    for (name, p) in dist {
                        d.insert(st.elem(name)?, parse_weight(p)?);
                    }
                    rows.insert(idx, d);
                }
                NodeWitness::Exists { f: rows }
            } else {
                let k = node
                    .get("k")
                    .ok_or_else(|| Error::WitnessShape(format!("{key}: needs `F` or `k`")))?;
                let list = |name: &str| -> Result<Vec<Rational>> {
                    node.get(name)
                        .and_then(Value::as_array)
                        .ok_or_else(|| {
                            Error::WitnessShape(format!("{key}: `{name}` must be an array"))
                        })?
                        .iter()
                        .map(parse_weight)
                        .collect()
                };
                NodeWitness::Split {
                    k: parse_weight(k)?,
                    yw: list("yw")?,
                    zw: list("zw")?,
                }
            };
            nodes.insert(path, w);
        }
        Ok(Self { nodes })
    }
}

/// Checks that `w` witnesses `team ⊨ f`. Search nodes below Boolean negation
/// cannot be witnessed and give [`Error::WitnessInsufficient`].
pub fn check_witness(st: &Structure, team: &Team, f: &Formula, w: &Witness) -> Result<bool> {
    for v in free_vars(f) {
        team.var_index(&v)?;
    }
    Checker {
        st,
        w,
        cfg: AtomConfig::default(),
    }
    .check(team, f, &AstPath::root())
}

struct Checker<'a> {
    st: &'a Structure,
    w: &'a Witness,
    cfg: AtomConfig,
}

impl Checker<'_> {
    fn node(&self, path: &AstPath) -> Result<&NodeWitness> {
        self.w
            .nodes
            .get(path)
            .ok_or_else(|| Error::WitnessShape(format!("no witness for node {path}")))
    }

    fn check(&self, team: &Team, f: &Formula, path: &AstPath) -> Result<bool> {
        match f {
            Formula::BoolNeg(b) => {
                if needs_search(b) {
                    return Err(Error::WitnessInsufficient(path.to_string()));
                }
                Ok(!exact::eval(self.st, team, b, &path.child(0), &self.cfg)?)
            }
            Formula::And(a, b) => {
                let va = self.check(team, a, &path.child(0))?;
                let vb = self.check(team, b, &path.child(1))?;
                Ok(va && vb)
            }
            Formula::Forall(x, b) => {
                let all: Vec<Elem> = self.st.elements().collect();
                self.check(&team.duplicate(x, &all)?, b, &path.child(0))
            }
            Formula::Exists(x, b) => {
                let NodeWitness::Exists { f: dists } = self.node(path)? else {
                    return Err(Error::WitnessShape(format!(
                        "{path}: expected an `F` witness"
                    )));
                };
                let team = &localize(team, f)?;
                let rows = team.support_tuples();
                if let Some(i) = dists.keys().find(|&&i| i >= rows.len()) {
                    return Err(Error::WitnessShape(format!(
                        "{path}: row index {i} out of range"
                    )));
                }
                let mut table = BTreeMap::new();
                for (i, r) in rows.iter().enumerate() {
                    let d = dists.get(&i).ok_or_else(|| {
                        Error::WitnessShape(format!("{path}: no distribution for row {i}"))
                    })?;
                    check_distribution(d)?;
                    table.insert(r.clone(), d.clone());
                }
                self.check(&team.extend(x, &table)?.support(), b, &path.child(0))
            }
            Formula::SplitOr(a, b) => {
                let NodeWitness::Split { k, yw, zw } = self.node(path)? else {
                    return Err(Error::WitnessShape(format!(
                        "{path}: expected a split witness"
                    )));
                };
                let (y, z) = self.split(&localize(team, f)?, k, yw, zw, path)?;
                let va = self.check(&y, a, &path.child(0))?;
                let vb = self.check(&z, b, &path.child(1))?;
                Ok(va && vb)
            }
            atom if atom.is_atom() => atom_holds(self.st, team, atom, &self.cfg),
            other => Err(Error::WrongDialect {
                expected: "FO_ATOMS_NEG".into(),
                found: other.to_string(),
            }),
        }
    }

    fn split(
        &self,
        team: &Team,
        k: &Rational,
        yw: &[Rational],
        zw: &[Rational],
        path: &AstPath,
    ) -> Result<(Team, Team)> {
        let rows: Vec<(Vec<Elem>, Rational)> = team
            .rows()
            .filter(|(_, w)| !w.is_zero())
            .map(|(t, w)| (t.clone(), w.clone()))
            .collect();
        if yw.len() != rows.len() || zw.len() != rows.len() {
            return Err(Error::WitnessShape(format!(
                "{path}: split lists need {} entries (got {} and {})",
                rows.len(),
                yw.len(),
                zw.len()
            )));
        }
        if k < &Rational::zero() || k > &Rational::one() {
            return Err(Error::InvalidScale(format_rational(k)));
        }
        for (name, part, used) in [("yw", yw, !k.is_zero()), ("zw", zw, !k.is_one())] {
            if part.iter().any(|p| p < &Rational::zero()) {
                return Err(Error::NotADistribution(format!(
                    "{path}: negative entry in {name}"
                )));
            }
            let s: Rational = part.iter().cloned().sum();
            if used && !rows.is_empty() && !s.is_one() {
                return Err(Error::NotADistribution(format!(
                    "{path}: {name} sums to {}",
                    format_rational(&s)
                )));
            }
        }
        let total = team.total();
        let one_minus = Rational::one() - k;
        let mut y_rows = Vec::new();
        let mut z_rows = Vec::new();
        for (i, (t, w)) in rows.iter().enumerate() {
            let mix = k * &yw[i] + &one_minus * &zw[i];
            if mix != w / &total {
                return Err(Error::SplitMismatch(format!("{path}: row {i}")));
            }
            y_rows.push((t.clone(), k * &total * &yw[i]));
            z_rows.push((t.clone(), &one_minus * &total * &zw[i]));
        }
        let vars = team.vars().to_vec();
        Ok((
            Team::from_rows(vars.clone(), y_rows)?.support(),
            Team::from_rows(vars, z_rows)?.support(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::parse;
    use crate::teameval::bounded::{eval_bounded_with, BoundedConfig};
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn corr() -> Team {
        Team::from_rows(["x", "y"], [(vec![0, 0], q(1, 2)), (vec![1, 1], q(1, 2))]).unwrap()
    }

    #[test]
    fn found_witnesses_check_and_roundtrip() {
        let st = Structure::with_size(2).unwrap();
        for text in [
            "x = @zero \\/ x = @one",
            "exists z. marg(x ; z) & indep( ; x ; z)",
            "forall u. exists z. (z = x \\/ z != x) & dep(x ; z)",
        ] {
            let f = parse(text).unwrap();
            let out = eval_bounded_with(&st, &corr(), &f, &BoundedConfig::new(2)).unwrap();
            let w = out.witness.expect(text);
            assert!(check_witness(&st, &corr(), &f, &w).unwrap(), "{text}");
            let back = Witness::from_json(&st, &w.to_json(&st)).unwrap();
            assert_eq!(back, w);
        }
    }

    #[test]
    fn bad_witnesses() {
        let st = Structure::with_size(2).unwrap();
        let f = parse("x = @zero \\/ x = @one").unwrap();
        let mut w = Witness::default();
        w.nodes.insert(
            AstPath::root(),
            NodeWitness::Split {
                k: q(1, 2),
                yw: vec![q(1, 1), q(0, 1)],
                zw: vec![q(1, 2), q(1, 2)],
            },
        );
        assert!(matches!(
            check_witness(&st, &corr(), &f, &w),
            Err(Error::SplitMismatch(_))
        ));
        w.nodes.insert(
            AstPath::root(),
            NodeWitness::Split {
                k: q(1, 2),
                yw: vec![q(0, 1), q(1, 1)],
                zw: vec![q(1, 1), q(0, 1)],
            },
        );
        assert!(!check_witness(&st, &corr(), &f, &w).unwrap());
        w.nodes.insert(
            AstPath::root(),
            NodeWitness::Split {
                k: q(1, 2),
                yw: vec![q(1, 1)],
                zw: vec![q(1, 1)],
            },
        );
        assert!(matches!(
            check_witness(&st, &corr(), &f, &w),
            Err(Error::WitnessShape(_))
        ));
        let g = parse("~(x = @zero \\/ x = @one)").unwrap();
        assert!(matches!(
            check_witness(&st, &corr(), &g, &w),
            Err(Error::WitnessInsufficient(_))
        ));
        let h = parse("exists z. z = x").unwrap();
        let mut w = Witness::default();
        w.nodes.insert(
            AstPath::root(),
            NodeWitness::Exists {
                f: BTreeMap::from([(0, BTreeMap::from([(0, q(1, 2))]))]),
            },
        );
        assert!(matches!(
            check_witness(&st, &corr(), &h, &w),
            Err(Error::NotADistribution(_))
        ));
    }
}
