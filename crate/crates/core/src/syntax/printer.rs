use std::fmt;

use crate::syntax::ast::{Condition, Formula, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "@{c}"),
        }
    }
}

fn write_rel(f: &mut fmt::Formatter<'_>, name: &str, args: &[Term], negated: bool) -> fmt::Result {
    if negated {
        write!(f, "!")?;
    }
    write!(f, "{name}(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{a}")?;
    }
    write!(f, ")")
}

fn write_eq(f: &mut fmt::Formatter<'_>, left: &Term, right: &Term, negated: bool) -> fmt::Result {
    write!(f, "{left} {} {right}", if negated { "!=" } else { "=" })
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Rel {
                name,
                args,
                negated,
            } => write_rel(f, name, args, *negated),
            Condition::Eq {
                left,
                right,
                negated,
            } => write_eq(f, left, right, *negated),
            Condition::Not(c) => write!(f, "!({c})"),
            Condition::And(a, b) => {
                write!(f, "{a} & ")?;
                if matches!(**b, Condition::And(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

fn list(vars: &[String]) -> String {
    vars.join(" ")
}

/// Binding strength: 1 for `\/` and `||`, 2 for `&`, 3 for everything else.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::SplitOr(..) | Formula::GlobalOr(..) => 1,
        Formula::And(..) => 2,
        _ => 3,
    }
}

/// Whether the printed form ends with an unparenthesized quantifier body,
/// which would swallow anything written after it.
fn ends_open(f: &Formula) -> bool {
    match f {
        Formula::Exists(..) | Formula::Forall(..) | Formula::Exists1(..) | Formula::Forall1(..) => {
            true
        }
        Formula::BoolNeg(c) | Formula::DotNeg(c) => level(c) == 3 && ends_open(c),
        Formula::And(_, b) | Formula::SplitOr(_, b) | Formula::GlobalOr(_, b) => {
            level(b) > level(f) && ends_open(b)
        }
        _ => false,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, child: &Formula, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Rel {
                name,
                args,
                negated,
            } => write_rel(f, name, args, *negated),
            Formula::Eq {
                left,
                right,
                negated,
            } => write_eq(f, left, right, *negated),
            Formula::Indep { cond, left, right } => {
                if cond.is_empty() {
                    write!(f, "indep( ; {} ; {})", list(left), list(right))
                } else {
                    write!(
                        f,
                        "indep({} ; {} ; {})",
                        list(cond),
                        list(left),
                        list(right)
                    )
                }
            }
            Formula::Dep { lhs, rhs } => write!(f, "dep({} ; {})", list(lhs), list(rhs)),
            Formula::Marg { lhs, rhs } => write!(f, "marg({} ; {})", list(lhs), list(rhs)),
            Formula::Entropy { lhs, rhs } => write!(f, "entropy({} ; {})", list(lhs), list(rhs)),
            Formula::Cmp(cs) => write!(f, "cmp({} | {} <= {} | {})", cs[0], cs[1], cs[2], cs[3]),
            Formula::BoolNeg(c) | Formula::DotNeg(c) => {
                write!(
                    f,
                    "{}",
                    if matches!(self, Formula::BoolNeg(_)) {
                        "~"
                    } else {
                        "not "
                    }
                )?;
                write_operand(f, c, level(c) < 3)
            }
            Formula::And(a, b) | Formula::SplitOr(a, b) | Formula::GlobalOr(a, b) => {
                let op = match self {
                    Formula::And(..) => "&",
                    Formula::SplitOr(..) => "\\/",
                    _ => "||",
                };
                let me = level(self);
                write_operand(f, a, level(a) < me || ends_open(a))?;
                write!(f, " {op} ")?;
                write_operand(f, b, level(b) <= me)
            }
            Formula::Exists(v, b) => write!(f, "exists {v}. {b}"),
            Formula::Forall(v, b) => write!(f, "forall {v}. {b}"),
            Formula::Exists1(v, b) => write!(f, "E1 {v}. {b}"),
            Formula::Forall1(v, b) => write!(f, "A1 {v}. {b}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::syntax::parser::parse;

    fn round(text: &str) -> String {
        let f = parse(text).unwrap();
        let printed = f.to_string();
        assert_eq!(parse(&printed).unwrap(), f, "reparse of `{printed}`");
        printed
    }

    #[test]
    fn prints_canonically() {
        assert_eq!(round("indep(;x;y)"), "indep( ; x ; y)");
        assert_eq!(round("R(x,y)&!S(x)"), "R(x, y) & !S(x)");
        assert_eq!(round("(exists x. R(x)) & S(y)"), "(exists x. R(x)) & S(y)");
        assert_eq!(
            round("~(exists x. R(x)) \\/ S(y)"),
            "(~exists x. R(x)) \\/ S(y)"
        );
        assert_eq!(round("R(x) & (S(x) & T(x))"), "R(x) & (S(x) & T(x))");
        assert_eq!(round("R(x) & S(x) & T(x)"), "R(x) & S(x) & T(x)");
        assert_eq!(round("not (R(x) || S(x))"), "not (R(x) || S(x))");
        assert_eq!(
            round("cmp(!(R(x)) & x=y | x=x <= !R(x) | x=x)"),
            "cmp(!(R(x)) & x = y | x = x <= !R(x) | x = x)"
        );
        assert_eq!(
            round("R(x) \\/ exists y. S(y) & R(y)"),
            "R(x) \\/ exists y. S(y) & R(y)"
        );
        assert_eq!(
            round("(R(x) & exists y. S(y)) \\/ R(x)"),
            "(R(x) & exists y. S(y)) \\/ R(x)"
        );
    }
}
