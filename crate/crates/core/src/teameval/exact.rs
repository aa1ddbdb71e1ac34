use crate::atoms::AtomConfig;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::structure::Structure;
use crate::syntax::ast::{AstPath, Formula};
use crate::syntax::dialect::{dialect_of, free_vars, Dialect};
use crate::team::WeightedTeam;

use super::atom_holds;

/// Exact evaluation of formulas without split disjunction and existential
/// quantifiers (atoms, literals, `&`, `~`, `forall`).
pub fn eval_exact<W: Scalar>(st: &Structure, team: &WeightedTeam<W>, f: &Formula) -> Result<bool> {
    eval_exact_with(st, team, f, &AtomConfig::default())
}

pub fn eval_exact_with<W: Scalar>(
    st: &Structure,
    team: &WeightedTeam<W>,
    f: &Formula,
    cfg: &AtomConfig,
) -> Result<bool> {
    if dialect_of(f)? == Dialect::Fopt {
        return Err(Error::WrongDialect {
            expected: "FO_ATOMS_NEG".into(),
            found: "FOPT".into(),
        });
    }
    for v in free_vars(f) {
        team.var_index(&v)?;
    }
    eval(st, team, f, &AstPath::root(), cfg)
}

pub(crate) fn eval<W: Scalar>(
    st: &Structure,
    team: &WeightedTeam<W>,
    f: &Formula,
    path: &AstPath,
    cfg: &AtomConfig,
) -> Result<bool> {
    match f {
        Formula::BoolNeg(b) => Ok(!eval(st, team, b, &path.child(0), cfg)?),
        Formula::And(a, b) => {
            Ok(eval(st, team, a, &path.child(0), cfg)? && eval(st, team, b, &path.child(1), cfg)?)
        }
        Formula::Forall(x, b) => {
            let all: Vec<_> = st.elements().collect();
            eval(st, &team.duplicate(x, &all)?, b, &path.child(0), cfg)
        }
        Formula::SplitOr(..) | Formula::Exists(..) => Err(Error::SearchRequired(path.to_string())),
        atom if atom.is_atom() => atom_holds(st, team, atom, cfg),
        other => Err(Error::WrongDialect {
            expected: "FO_ATOMS_NEG".into(),
            found: other.to_string(),
        }),
    }
}
