//! Translation of FOPT formulas into classical first-order formulas.

use crate::error::{Error, Result};
use crate::syntax::ast::{Condition, Formula};
use crate::syntax::dialect::{dialect_of, Dialect};

/// Classical negation of an FO formula, pushed down to the literals.
pub fn negate_fo(f: &Formula) -> Result<Formula> {
    Ok(match f {
        Formula::Rel {
            name,
            args,
            negated,
        } => Formula::Rel {
            name: name.clone(),
            args: args.clone(),
            negated: !negated,
        },
        Formula::Eq {
            left,
            right,
            negated,
        } => Formula::Eq {
            left: left.clone(),
            right: right.clone(),
            negated: !negated,
        },
        Formula::And(a, b) => Formula::split_or(negate_fo(a)?, negate_fo(b)?),
        Formula::SplitOr(a, b) => Formula::and(negate_fo(a)?, negate_fo(b)?),
        Formula::Exists(v, b) => Formula::forall(v, negate_fo(b)?),
        Formula::Forall(v, b) => Formula::exists(v, negate_fo(b)?),
        other => {
            return Err(Error::WrongDialect {
                expected: "FO".into(),
                found: other.to_string(),
            });
        }
    })
}

/// A condition as an FO formula; `positive = false` yields its negation.
pub fn condition_to_fo(c: &Condition, positive: bool) -> Formula {
    match c {
        Condition::Rel {
            name,
            args,
            negated,
        } => Formula::Rel {
            name: name.clone(),
            args: args.clone(),
            negated: *negated != !positive,
        },
        Condition::Eq {
            left,
            right,
            negated,
        } => Formula::Eq {
            left: left.clone(),
            right: right.clone(),
            negated: *negated != !positive,
        },
        Condition::Not(inner) => condition_to_fo(inner, !positive),
        Condition::And(a, b) => {
            let (a, b) = (condition_to_fo(a, positive), condition_to_fo(b, positive));
            if positive {
                Formula::and(a, b)
            } else {
                Formula::split_or(a, b)
            }
        }
    }
}

fn star(f: &Formula) -> Result<Formula> {
    Ok(match f {
        Formula::Rel { .. } | Formula::Eq { .. } => f.clone(),
        Formula::Cmp(cs) => {
            let [c0, c1, c2, c3] = &**cs;
            Formula::split_or(
                Formula::split_or(
                    Formula::split_or(condition_to_fo(c0, false), condition_to_fo(c1, false)),
                    condition_to_fo(c2, true),
                ),
                condition_to_fo(c3, false),
            )
        }
        Formula::DotNeg(b) => negate_fo(&star(b)?)?,
        Formula::And(a, b) => Formula::and(star(a)?, star(b)?),
        Formula::GlobalOr(a, b) => Formula::split_or(star(a)?, star(b)?),
        Formula::Exists1(v, b) => Formula::exists(v, star(b)?),
        Formula::Forall1(v, b) => Formula::forall(v, star(b)?),
        other => {
            return Err(Error::WrongDialect {
                expected: "FOPT".into(),
                found: other.to_string(),
            })
        }
    })
}

/// The classical counterpart `φ*` of an FOPT formula: comparison atoms become
/// `¬δ0 ∨ ¬δ1 ∨ δ2 ∨ ¬δ3`, `not` becomes classical negation, `||` becomes `∨`
/// and `E1`/`A1` become `∃`/`∀`. Negations are pushed to literals so the
/// result stays in the FO grammar.
pub fn star_translate(f: &Formula) -> Result<Formula> {
    match dialect_of(f)? {
        Dialect::Fopt | Dialect::Fo
            if !f.any(&|g| {
                matches!(
                    g,
                    Formula::SplitOr(..) | Formula::Exists(..) | Formula::Forall(..)
                )
            }) =>
        {
            star(f)
        }
        d => Err(Error::WrongDialect {
            expected: "FOPT".into(),
            found: d.to_string(),
        }),
    }
}
