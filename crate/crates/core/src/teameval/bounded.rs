//! Bounded-witness oracle.
//!
//! Split disjunction and the existential quantifier are decided by searching
//! witnesses on a rational grid with denominator `D`: each row of a split is
//! divided in proportion `m/D`, and each distribution `F(s)` takes values in
//! `{0, 1/D, …, 1}`. Point-mass and small-support witnesses are tried first,
//! and partial witnesses are pruned with [`super::prune::feasible`].

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::atoms::AtomConfig;
use crate::error::{Error, Result};
use crate::scalar::Rational;
use crate::structure::{Elem, Structure};
use crate::syntax::ast::{AstPath, Formula, Var};
use crate::syntax::dialect::{dialect_of, free_vars, Dialect};
use crate::team::WeightedTeam;

use super::prune::{feasible, RowSet};
use super::witness::{NodeWitness, Witness};
use super::{atom_holds, localize};

type Team = WeightedTeam<Rational>;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedConfig {
    /// Grid denominator `D ≥ 1`.
    pub denom: u64,
    /// Maximum number of search nodes before giving up with [`Error::Overflow`].
    pub budget: u64,
    pub atoms: AtomConfig,
}

impl BoundedConfig {
    pub fn new(denom: u64) -> Self {
        Self {
            denom,
            budget: DEFAULT_BUDGET,
            atoms: AtomConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundedOutcome {
    pub value: bool,
    /// Witness for the search nodes when the value is true.
    pub witness: Option<Witness>,
    pub nodes: u64,
}

pub fn eval_bounded(st: &Structure, team: &Team, f: &Formula, denom: u64) -> Result<bool> {
    eval_bounded_with(st, team, f, &BoundedConfig::new(denom)).map(|o| o.value)
}

pub fn eval_bounded_with(
    st: &Structure,
    team: &Team,
    f: &Formula,
    cfg: &BoundedConfig,
) -> Result<BoundedOutcome> {
    if cfg.denom == 0 {
        return Err(Error::Unsupported(
            "grid denominator must be at least 1".into(),
        ));
    }
    if dialect_of(f)? == Dialect::Fopt {
        return Err(Error::WrongDialect {
            expected: "FO_ATOMS_NEG".into(),
            found: "FOPT".into(),
        });
    }
    for v in free_vars(f) {
        team.var_index(&v)?;
    }
    let mut s = Search {
        st,
        cfg,
        nodes: 0,
        dists: BTreeMap::new(),
    };
    let w = s.sat(&team.support(), f, &AstPath::root())?;
    Ok(BoundedOutcome {
        value: w.is_some(),
        witness: w.map(|nodes| Witness { nodes }),
        nodes: s.nodes,
    })
}

type Found = Option<BTreeMap<AstPath, NodeWitness>>;

struct Search<'a> {
    st: &'a Structure,
    cfg: &'a BoundedConfig,
    nodes: u64,
    /// Candidate distributions keyed by the preferred element order.
    dists: BTreeMap<Vec<Elem>, std::rc::Rc<Vec<Vec<(Elem, Rational)>>>>,
}

fn ratio(m: u64, d: u64) -> Rational {
    Rational::new(BigInt::from(m), BigInt::from(d))
}

/// Compositions of `total` into `parts` positive integers.
fn compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return if total >= 1 {
            vec![vec![total]]
        } else {
            vec![]
        };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts as u64 - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn subsets(order: &[Elem], size: usize) -> Vec<Vec<Elem>> {
    if size == 0 {
        return vec![vec![]];
    }
    if order.len() < size {
        return vec![];
    }
    let mut out = Vec::new();
    for i in 0..=order.len() - size {
        for mut rest in subsets(&order[i + 1..], size - 1) {
            rest.insert(0, order[i]);
            out.push(rest);
        }
    }
    out
}

impl Search<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cfg.budget {
            return Err(Error::Overflow(self.cfg.budget));
        }
        Ok(())
    }

    /// All grid distributions over the domain, smallest supports first,
    /// elements in `order` preferred.
    fn distributions(&mut self, order: Vec<Elem>) -> std::rc::Rc<Vec<Vec<(Elem, Rational)>>> {
        let d = self.cfg.denom;
        self.dists
            .entry(order.clone())
            .or_insert_with(|| {
                let mut out = Vec::new();
                for size in 1..=order.len().min(d as usize) {
                    for support in subsets(&order, size) {
                        for comp in compositions(d, size) {
                            out.push(
                                support
                                    .iter()
                                    .zip(&comp)
                                    .map(|(&e, &m)| (e, ratio(m, d)))
                                    .collect(),
                            );
                        }
                    }
                }
                std::rc::Rc::new(out)
            })
            .clone()
    }

    fn preferred_order(&self, row: &[Elem]) -> Vec<Elem> {
        let mut seen = BTreeSet::new();
        let mut order: Vec<Elem> = row.iter().copied().filter(|e| seen.insert(*e)).collect();
        order.extend(self.st.elements().filter(|e| !seen.contains(e)));
        order
    }

    fn sat(&mut self, team: &Team, f: &Formula, path: &AstPath) -> Result<Found> {
        self.tick()?;
        match f {
            Formula::BoolNeg(b) => Ok(if self.sat(team, b, &path.child(0))?.is_some() {
                None
            } else {
                Some(BTreeMap::new())
            }),
            Formula::And(a, b) => {
                let Some(mut wa) = self.sat(team, a, &path.child(0))? else {
                    return Ok(None);
                };
                let Some(wb) = self.sat(team, b, &path.child(1))? else {
                    return Ok(None);
                };
                wa.extend(wb);
                Ok(Some(wa))
            }
            Formula::Forall(x, b) => {
                let all: Vec<Elem> = self.st.elements().collect();
                self.sat(&team.duplicate(x, &all)?, b, &path.child(0))
            }
            Formula::Exists(x, b) => self.sat_exists(&localize(team, f)?.support(), x, b, path),
            Formula::SplitOr(a, b) => self.sat_split(&localize(team, f)?, a, b, path),
            atom if atom.is_atom() => Ok(if atom_holds(self.st, team, atom, &self.cfg.atoms)? {
                Some(BTreeMap::new())
            } else {
                None
            }),
            other => Err(Error::WrongDialect {
                expected: "FO_ATOMS_NEG".into(),
                found: other.to_string(),
            }),
        }
    }

    fn sat_exists(
        &mut self,
        team: &Team,
        x: &Var,
        body: &Formula,
        path: &AstPath,
    ) -> Result<Found> {
        let rows: Vec<Vec<Elem>> = team.support_tuples();
        let mut vars = team.vars().to_vec();
        let pos = match vars.iter().position(|v| v == x) {
            Some(i) => i,
            None => {
                vars.push(x.clone());
                vars.len() - 1
            }
        };
        let cands: Vec<_> = rows
            .iter()
            .map(|r| self.distributions(self.preferred_order(r)))
            .collect();
        let mut chosen = vec![0usize; rows.len()];
        let mut partial: BTreeMap<Vec<Elem>, usize> = BTreeMap::new();
        let ctx = ExistsCtx {
            team,
            x,
            body,
            path,
            rows: &rows,
            pos,
            vars: &vars,
            cands: &cands,
        };
        self.exists_dfs(&ctx, 0, &mut chosen, &mut partial)
    }

    fn exists_dfs(
        &mut self,
        ctx: &ExistsCtx<'_>,
        i: usize,
        chosen: &mut Vec<usize>,
        partial: &mut BTreeMap<Vec<Elem>, usize>,
    ) -> Result<Found> {
        if i == ctx.rows.len() {
            let mut f: BTreeMap<Vec<Elem>, BTreeMap<Elem, Rational>> = BTreeMap::new();
            for (idx, (r, &c)) in ctx.rows.iter().zip(chosen.iter()).enumerate() {
                f.insert(r.clone(), ctx.cands[idx][c].iter().cloned().collect());
            }
            let ext = ctx.team.extend(ctx.x, &f)?;
            let Some(mut w) = self.sat(&ext, ctx.body, &ctx.path.child(0))? else {
                return Ok(None);
            };
            let by_index = ctx
                .rows
                .iter()
                .enumerate()
                .map(|(idx, r)| (idx, f[r].clone()))
                .collect::<BTreeMap<usize, BTreeMap<Elem, Rational>>>();
            w.insert(ctx.path.clone(), NodeWitness::Exists { f: by_index });
            return Ok(Some(w));
        }
        let row = &ctx.rows[i];
        for c in 0..ctx.cands[i].len() {
            self.tick()?;
            let added: Vec<Vec<Elem>> = ctx.cands[i][c]
                .iter()
                .map(|(a, _)| {
                    let mut t = row.clone();
                    if ctx.pos < t.len() {
                        t[ctx.pos] = *a;
                    } else {
                        t.push(*a);
                    }
                    t
                })
                .collect();
            for t in &added {
                *partial.entry(t.clone()).or_insert(0) += 1;
            }
            let rs = RowSet {
                vars: ctx.vars.to_vec(),
                rows: partial.keys().cloned().collect(),
            };
            let ok = feasible(self.st, ctx.body, &rs)?;
            let found = if ok {
                chosen[i] = c;
                self.exists_dfs(ctx, i + 1, chosen, partial)?
            } else {
                None
            };
            for t in &added {
                let n = partial.get_mut(t).expect("present");
                *n -= 1;
                if *n == 0 {
                    partial.remove(t);
                }
            }
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    fn sat_split(
        &mut self,
        team: &Team,
        a: &Formula,
        b: &Formula,
        path: &AstPath,
    ) -> Result<Found> {
        let rows: Vec<(Vec<Elem>, Rational)> = team
            .rows()
            .filter(|(_, w)| !w.is_zero())
            .map(|(t, w)| (t.clone(), w.clone()))
            .collect();
        let d = self.cfg.denom;
        let mut options = Vec::with_capacity(rows.len());
        for (t, _) in &rows {
            let one = RowSet {
                vars: team.vars().to_vec(),
                rows: BTreeSet::from([t.clone()]),
            };
            let can_l = feasible(self.st, a, &one)?;
            let can_r = feasible(self.st, b, &one)?;
            let mut opts = Vec::new();
            if can_l {
                opts.push(d);
            }
            if can_r {
                opts.push(0);
            }
            if can_l && can_r {
                opts.extend(1..d);
            }
            if opts.is_empty() {
                return Ok(None);
            }
            options.push(opts);
        }
        let mut chosen = vec![0u64; rows.len()];
        let ctx = SplitCtx {
            team,
            a,
            b,
            path,
            rows: &rows,
            options: &options,
        };
        let mut left = RowSet::new(team.vars().to_vec());
        let mut right = RowSet::new(team.vars().to_vec());
        self.split_dfs(&ctx, 0, &mut chosen, &mut left, &mut right)
    }

    fn split_dfs(
        &mut self,
        ctx: &SplitCtx<'_>,
        i: usize,
        chosen: &mut Vec<u64>,
        left: &mut RowSet,
        right: &mut RowSet,
    ) -> Result<Found> {
        let d = self.cfg.denom;
        if i == ctx.rows.len() {
            let vars = ctx.team.vars().to_vec();
            let mut y_rows = Vec::new();
            let mut z_rows = Vec::new();
            for ((t, w), &m) in ctx.rows.iter().zip(chosen.iter()) {
                if m > 0 {
                    y_rows.push((t.clone(), w.clone() * ratio(m, d)));
                }
                if m < d {
                    z_rows.push((t.clone(), w.clone() * ratio(d - m, d)));
                }
            }
            let y = Team::from_rows(vars.clone(), y_rows)?;
            let z = Team::from_rows(vars, z_rows)?;
            let Some(mut wa) = self.sat(&y, ctx.a, &ctx.path.child(0))? else {
                return Ok(None);
            };
            let Some(wb) = self.sat(&z, ctx.b, &ctx.path.child(1))? else {
                return Ok(None);
            };
            wa.extend(wb);
            wa.insert(ctx.path.clone(), split_witness(ctx.team, &y, &z));
            return Ok(Some(wa));
        }
        let t = &ctx.rows[i].0;
        for &m in &ctx.options[i] {
            self.tick()?;
            let to_left = m > 0 && !left.rows.contains(t);
            let to_right = m < d && !right.rows.contains(t);
            if to_left {
                left.rows.insert(t.clone());
            }
            if to_right {
                right.rows.insert(t.clone());
            }
            let ok = (!to_left || feasible(self.st, ctx.a, left)?)
                && (!to_right || feasible(self.st, ctx.b, right)?);
            let found = if ok {
                chosen[i] = m;
                self.split_dfs(ctx, i + 1, chosen, left, right)?
            } else {
                None
            };
            if to_left {
                left.rows.remove(t);
            }
            if to_right {
                right.rows.remove(t);
            }
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
}

struct ExistsCtx<'a> {
    team: &'a Team,
    x: &'a Var,
    body: &'a Formula,
    path: &'a AstPath,
    rows: &'a [Vec<Elem>],
    pos: usize,
    vars: &'a [Var],
    cands: &'a [std::rc::Rc<Vec<Vec<(Elem, Rational)>>>],
}

struct SplitCtx<'a> {
    team: &'a Team,
    a: &'a Formula,
    b: &'a Formula,
    path: &'a AstPath,
    rows: &'a [(Vec<Elem>, Rational)],
    options: &'a [Vec<u64>],
}

/// Split witness in normalized form: `k = |Y|/|X|`, `yw = Y/|Y|`, `zw = Z/|Z|`
/// indexed by the support rows of `team`.
pub(crate) fn split_witness(team: &Team, y: &Team, z: &Team) -> NodeWitness {
    let total = team.total();
    let (ty, tz) = (y.total(), z.total());
    let k = if total.is_zero() {
        Rational::zero()
    } else {
        ty.clone() / total
    };
    let norm = |part: &Team, t: &Rational, row: &[Elem]| {
        if t.is_zero() {
            Rational::zero()
        } else {
            part.weight_of(row) / t.clone()
        }
    };
    let rows = team.support_tuples();
    NodeWitness::Split {
        k,
        yw: rows.iter().map(|r| norm(y, &ty, r)).collect(),
        zw: rows.iter().map(|r| norm(z, &tz, r)).collect(),
    }
}
