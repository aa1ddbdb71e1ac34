//! Team semantics for first-order logic with team atoms and Boolean negation.
//!
//! Sub-teams produced by split disjunction are the unnormalized parts of the
//! parent team; a part may be empty (all weights zero). Every atom holds on
//! the empty team, including the entropy atom.

pub mod bounded;
pub mod exact;
pub mod prune;
pub mod witness;

use crate::atoms::{eval_atom_with, AtomConfig};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::structure::Structure;
use crate::syntax::ast::Formula;
use crate::team::WeightedTeam;

pub use bounded::{eval_bounded, eval_bounded_with, BoundedConfig, BoundedOutcome, DEFAULT_BUDGET};
pub use exact::eval_exact;
pub use witness::{check_witness, NodeWitness, Witness};

/// `team` restricted to the free variables of `f`, in team order. Search
/// nodes run on this restriction so the grid depends only on the columns the
/// subformula can see.
pub(crate) fn localize(
    team: &WeightedTeam<crate::scalar::Rational>,
    f: &Formula,
) -> Result<WeightedTeam<crate::scalar::Rational>> {
    let fv = crate::syntax::dialect::free_vars(f);
    if team.vars().iter().all(|v| fv.contains(v)) {
        return Ok(team.clone());
    }
    let keep: Vec<&String> = team.vars().iter().filter(|v| fv.contains(*v)).collect();
    team.restrict(&keep)
}

/// Atom semantics inside the team evaluators.
pub(crate) fn atom_holds<W: Scalar>(
    st: &Structure,
    team: &WeightedTeam<W>,
    atom: &Formula,
    cfg: &AtomConfig,
) -> Result<bool> {
    if matches!(atom, Formula::Entropy { .. }) && team.is_empty() {
        for v in crate::syntax::dialect::free_vars(atom) {
            team.var_index(&v)?;
        }
        return Ok(true);
    }
    eval_atom_with(st, team, atom, cfg)
}
