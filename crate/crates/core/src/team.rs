//! Weighted (probabilistic) teams and the team algebra.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::structure::{Elem, Structure};
use crate::syntax::ast::{Condition, RowView};

/// A team: variable list plus rows of domain tuples with nonnegative
/// weights. Absent tuples have weight zero. Rows are kept in lexicographic
/// tuple order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTeam<W: Scalar = Rational> {
    vars: Vec<String>,
    rows: BTreeMap<Vec<Elem>, W>,
}

fn check_vars(vars: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for v in vars {
        if !seen.insert(v) {
            return Err(Error::DuplicateVariable(v.clone()));
        }
    }
    Ok(())
}

impl<W: Scalar> WeightedTeam<W> {
    /// Team over `vars` with no rows.
    pub fn empty<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Result<Self> {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        check_vars(&vars)?;
        Ok(Self {
            vars,
            rows: BTreeMap::new(),
        })
    }

    /// The team over no variables whose single (empty) assignment has weight 1.
    pub fn unit() -> Self {
        let mut rows = BTreeMap::new();
        rows.insert(Vec::new(), W::one());
        Self {
            vars: Vec::new(),
            rows,
        }
    }

    pub fn from_rows<S: Into<String>>(
        vars: impl IntoIterator<Item = S>,
        rows: impl IntoIterator<Item = (Vec<Elem>, W)>,
    ) -> Result<Self> {
        let mut team = Self::empty(vars)?;
        for (t, w) in rows {
            if t.len() != team.vars.len() {
                return Err(Error::TupleLength {
                    expected: team.vars.len(),
                    found: t.len(),
                });
            }
            if w.is_negative() {
                return Err(Error::NegativeWeight(w.to_string()));
            }
            if team.rows.contains_key(&t) {
                return Err(Error::DuplicateTuple(format!("{t:?}")));
            }
            team.rows.insert(t, w);
        }
        Ok(team)
    }

    /// Uniform weights on the given tuples (duplicates merge).
    pub fn uniform<S: Into<String>>(
        vars: impl IntoIterator<Item = S>,
        tuples: &[Vec<Elem>],
    ) -> Result<Self> {
        let mut team = Self::empty(vars)?;
        let n = W::from_usize(tuples.len().max(1));
        for t in tuples {
            if t.len() != team.vars.len() {
                return Err(Error::TupleLength {
                    expected: team.vars.len(),
                    found: t.len(),
                });
            }
            team.add(t.clone(), W::one() / n.clone());
        }
        Ok(team)
    }

    fn add(&mut self, t: Vec<Elem>, w: W) {
        match self.rows.get_mut(&t) {
            Some(old) => *old = old.clone() + w,
            None => {
                self.rows.insert(t, w);
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn has_var(&self, v: &str) -> bool {
        self.vars.iter().any(|x| x == v)
    }

    pub fn var_index(&self, v: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|x| x == v)
            .ok_or_else(|| Error::UnknownVariable(v.to_string()))
    }

    pub fn rows(&self) -> impl Iterator<Item = (&Vec<Elem>, &W)> {
        self.rows.iter()
    }

    pub fn row_map(&self) -> &BTreeMap<Vec<Elem>, W> {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.values().all(|w| w.is_zero())
    }

    pub fn weight_of(&self, t: &[Elem]) -> W {
        self.rows.get(t).cloned().unwrap_or_else(W::zero)
    }

    pub fn view<'a>(&'a self, t: &'a [Elem]) -> RowView<'a> {
        RowView {
            vars: &self.vars,
            values: t,
        }
    }

    pub fn total(&self) -> W {
        self.rows.values().fold(W::zero(), |acc, w| acc + w.clone())
    }

    pub fn is_normalized(&self) -> bool {
        self.total().approx_eq(&W::one())
    }

    /// The same team with zero-weight rows removed.
    pub fn support(&self) -> Self {
        Self {
            vars: self.vars.clone(),
            rows: self
                .rows
                .iter()
                .filter(|(_, w)| !w.is_zero())
                .map(|(t, w)| (t.clone(), w.clone()))
                .collect(),
        }
    }

    pub fn support_tuples(&self) -> Vec<Vec<Elem>> {
        self.rows
            .iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(t, _)| t.clone())
            .collect()
    }

    /// Divides all weights by the total.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total();
        if total.is_zero() {
            return Err(Error::ZeroWeightTeam);
        }
        Ok(self.scale_by(&(W::one() / total)))
    }

    /// Multiplies every weight by `c ≥ 0`.
    pub fn scale_by(&self, c: &W) -> Self {
        Self {
            vars: self.vars.clone(),
            rows: self
                .rows
                .iter()
                .map(|(t, w)| (t.clone(), w.clone() * c.clone()))
                .collect(),
        }
    }

    /// Column indices of `vars` in this team.
    pub fn indices(&self, vars: &[String]) -> Result<Vec<usize>> {
        vars.iter().map(|v| self.var_index(v)).collect()
    }

    /// Marginal weights of the tuple `vars` (in the given order, repetitions allowed).
    pub fn marginal(&self, vars: &[String]) -> Result<BTreeMap<Vec<Elem>, W>> {
        let idx = self.indices(vars)?;
        let mut out: BTreeMap<Vec<Elem>, W> = BTreeMap::new();
        for (t, w) in &self.rows {
            let key: Vec<Elem> = idx.iter().map(|&i| t[i]).collect();
            match out.get_mut(&key) {
                Some(old) => *old = old.clone() + w.clone(),
                None => {
                    out.insert(key, w.clone());
                }
            }
        }
        Ok(out)
    }

    /// `X↾V`: variables of `keep` in this team's order, weights summed over preimages.
    pub fn restrict<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        for v in keep {
            self.var_index(v.as_ref())?;
        }
        let vars: Vec<String> = self
            .vars
            .iter()
            .filter(|v| keep.iter().any(|k| k.as_ref() == v.as_str()))
            .cloned()
            .collect();
        let rows = self.marginal(&vars)?;
        Ok(Self { vars, rows })
    }

    /// Reorders (and possibly drops) columns: result variables are exactly `order`.
    pub fn reorder(&self, order: &[String]) -> Result<Self> {
        check_vars(order)?;
        Ok(Self {
            vars: order.to_vec(),
            rows: self.marginal(order)?,
        })
    }

    /// `|X_δ|`: total weight of the rows satisfying `cond`.
    pub fn weight(&self, st: &Structure, cond: &Condition) -> Result<W> {
        let mut sum = W::zero();
        for (t, w) in &self.rows {
            if cond.eval(&self.view(t), st)? {
                sum = sum + w.clone();
            }
        }
        Ok(sum)
    }

    /// `X(B/x)`: every row is copied once per element of `B` with weight `w/|B|`;
    /// if `x` is already a variable its old value is overwritten and colliding rows add.
    pub fn duplicate(&self, x: &str, b: &[Elem]) -> Result<Self> {
        let b: BTreeSet<Elem> = b.iter().copied().collect();
        if b.is_empty() {
            return Err(Error::EmptyDuplicationSet);
        }
        let n = W::from_usize(b.len());
        let (vars, pos) = self.column_for(x);
        let mut out = Self {
            vars,
            rows: BTreeMap::new(),
        };
        for (t, w) in &self.rows {
            let share = w.clone() / n.clone();
            for &a in &b {
                out.add(with_value(t, pos, a), share.clone());
            }
        }
        Ok(out)
    }

    /// `X(F/x)`: `f` maps each support row to a distribution over the domain.
    pub fn extend(&self, x: &str, f: &BTreeMap<Vec<Elem>, BTreeMap<Elem, W>>) -> Result<Self> {
        let (vars, pos) = self.column_for(x);
        let mut out = Self {
            vars,
            rows: BTreeMap::new(),
        };
        for (t, w) in &self.rows {
            if w.is_zero() {
                continue;
            }
            let dist = f
                .get(t)
                .ok_or_else(|| Error::NotADistribution(format!("no distribution for row {t:?}")))?;
            check_distribution(dist)?;
            for (&a, p) in dist {
                if !p.is_zero() {
                    out.add(with_value(t, pos, a), w.clone() * p.clone());
                }
            }
        }
        Ok(out)
    }

    fn column_for(&self, x: &str) -> (Vec<String>, usize) {
        match self.vars.iter().position(|v| v == x) {
            Some(i) => (self.vars.clone(), i),
            None => {
                let mut vars = self.vars.clone();
                vars.push(x.to_string());
                let i = vars.len() - 1;
                (vars, i)
            }
        }
    }

    /// `X ⊔ₖ Y`: weight `k·X(s) + (1−k)·Y(s)` on the union of the row sets.
    pub fn scaled_union(x: &Self, y: &Self, k: &W) -> Result<Self> {
        if x.vars != y.vars {
            return Err(Error::MismatchedVariables(x.vars.clone(), y.vars.clone()));
        }
        if k.is_negative() || *k > W::one() {
            return Err(Error::InvalidScale(k.to_string()));
        }
        let kc = W::one() - k.clone();
        let mut out = Self {
            vars: x.vars.clone(),
            rows: BTreeMap::new(),
        };
        for (t, w) in &x.rows {
            out.add(t.clone(), k.clone() * w.clone());
        }
        for (t, w) in &y.rows {
            out.add(t.clone(), kc.clone() * w.clone());
        }
        Ok(out)
    }

    /// Pointwise sum of two teams over the same variables.
    pub fn sum(x: &Self, y: &Self) -> Result<Self> {
        if x.vars != y.vars {
            return Err(Error::MismatchedVariables(x.vars.clone(), y.vars.clone()));
        }
        let mut out = x.clone();
        for (t, w) in &y.rows {
            out.add(t.clone(), w.clone());
        }
        Ok(out)
    }

    /// Same rows with weights converted by `f`.
    pub fn map_weights<V: Scalar>(&self, f: impl Fn(&W) -> V) -> WeightedTeam<V> {
        WeightedTeam {
            vars: self.vars.clone(),
            rows: self.rows.iter().map(|(t, w)| (t.clone(), f(w))).collect(),
        }
    }
}

impl WeightedTeam<Rational> {
    pub fn to_float<V: Scalar>(&self) -> WeightedTeam<V> {
        self.map_weights(V::from_rational)
    }
}

fn with_value(t: &[Elem], pos: usize, a: Elem) -> Vec<Elem> {
    let mut out = t.to_vec();
    if pos < out.len() {
        out[pos] = a;
    } else {
        out.push(a);
    }
    out
}

/// Nonnegative weights summing to one (exactly for rationals).
pub fn check_distribution<W: Scalar>(dist: &BTreeMap<Elem, W>) -> Result<()> {
    if let Some(p) = dist.values().find(|p| p.is_negative()) {
        return Err(Error::NotADistribution(format!("negative probability {p}")));
    }
    let total = dist.values().fold(W::zero(), |acc, p| acc + p.clone());
    if !total.approx_eq(&W::one()) {
        return Err(Error::NotADistribution(format!(
            "probabilities sum to {total}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn team(vars: &[&str], rows: &[(&[Elem], Rational)]) -> WeightedTeam {
        WeightedTeam::from_rows(
            vars.iter().copied(),
            rows.iter().map(|(t, w)| (t.to_vec(), w.clone())),
        )
        .unwrap()
    }

    #[test]
    fn restrict_sums_preimages() {
        let x = team(&["x", "y"], &[(&[0, 1], q(1, 3)), (&[0, 2], q(2, 3))]);
        let r = x.restrict(&["x"]).unwrap();
        assert_eq!(r.vars(), ["x"]);
        assert_eq!(r.weight_of(&[0]), q(1, 1));
        assert_eq!(x.restrict(&["y", "x"]).unwrap(), x);
        assert!(matches!(x.restrict(&["z"]), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn weight_of_condition() {
        let st = Structure::new(["a", "b"]).unwrap();
        let x = team(&["x"], &[(&[0], q(1, 4)), (&[1], q(3, 4))]);
        let cond = Condition::Eq {
            left: crate::syntax::ast::Term::var("x"),
            right: crate::syntax::ast::Term::Var("x".into()),
            negated: false,
        };
        assert_eq!(x.weight(&st, &cond).unwrap(), q(1, 1));
    }

    #[test]
    fn duplicate_fresh_and_collision() {
        let unit = WeightedTeam::<Rational>::unit();
        let d = unit.duplicate("x", &[0, 1]).unwrap();
        assert_eq!(d.weight_of(&[0]), q(1, 2));
        assert_eq!(d.weight_of(&[1]), q(1, 2));
        let x = team(&["x", "y"], &[(&[0, 0], q(1, 4)), (&[1, 0], q(3, 4))]);
        let d = x.duplicate("x", &[0, 1]).unwrap();
        assert_eq!(d.weight_of(&[0, 0]), q(1, 2));
        assert_eq!(d.weight_of(&[1, 0]), q(1, 2));
        assert!(matches!(
            x.duplicate("x", &[]),
            Err(Error::EmptyDuplicationSet)
        ));
    }

    #[test]
    fn extend_checks_distributions() {
        let unit = WeightedTeam::<Rational>::unit();
        let mut f = BTreeMap::new();
        f.insert(vec![], BTreeMap::from([(0, q(1, 2)), (1, q(1, 2))]));
        let e = unit.extend("x", &f).unwrap();
        assert_eq!(e.weight_of(&[1]), q(1, 2));
        f.insert(vec![], BTreeMap::from([(0, q(9, 10))]));
        assert!(matches!(
            unit.extend("x", &f),
            Err(Error::NotADistribution(_))
        ));
    }

    #[test]
    fn scaled_union_cases() {
        let x = team(&["x"], &[(&[0], q(1, 1))]);
        let y = team(&["x"], &[(&[1], q(1, 1))]);
        let u = WeightedTeam::scaled_union(&x, &y, &q(1, 3)).unwrap();
        assert_eq!(u.weight_of(&[0]), q(1, 3));
        assert_eq!(u.weight_of(&[1]), q(2, 3));
        let z = team(&["y"], &[]);
        assert!(WeightedTeam::scaled_union(&x, &z, &q(1, 2)).is_err());
        assert!(WeightedTeam::scaled_union(&x, &y, &q(3, 2)).is_err());
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(WeightedTeam::<Rational>::from_rows(["x"], [(vec![0], q(-1, 2))]).is_err());
        assert!(WeightedTeam::<Rational>::from_rows(
            ["x"],
            [(vec![0], q(1, 2)), (vec![0], q(1, 2))]
        )
        .is_err());
        assert!(WeightedTeam::<Rational>::from_rows(["x"], [(vec![0, 1], q(1, 2))]).is_err());
        assert!(WeightedTeam::<Rational>::empty(["x", "x"]).is_err());
    }

    #[test]
    fn float_instance_works() {
        let x = WeightedTeam::<f64>::from_rows(["x"], [(vec![0], 0.25), (vec![1], 0.75)]).unwrap();
        assert!(x.is_normalized());
        let d = x.duplicate("y", &[0, 1]).unwrap();
        assert!((d.total() - 1.0).abs() < 1e-12);
    }
}
