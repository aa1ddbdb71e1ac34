use std::fmt::Write;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::scalar::Rational;

use super::{Mode, RFormula, RRel, RTerm, RealSystem, VarId};

fn rational(r: &Rational) -> String {
    let body = if r.is_integer() {
        format!("{}", r.numer().abs())
    } else {
        format!("(/ {} {})", r.numer().abs(), r.denom())
    };
    if r.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

fn term(sys: &RealSystem, t: &RTerm, out: &mut String) -> Result<()> {
    match t {
        RTerm::Var(v) => out.push_str(&sys.vars[*v].name),
        RTerm::Const(c) => out.push_str(&rational(c)),
        RTerm::Add(ts) | RTerm::Mul(ts) => {
            let (op, unit) = if matches!(t, RTerm::Add(_)) {
                ("+", "0")
            } else {
                ("*", "1")
            };
            match ts.len() {
                0 => out.push_str(unit),
                1 => term(sys, &ts[0], out)?,
                _ => {
                    out.push('(');
                    out.push_str(op);
                    for x in ts {
                        out.push(' ');
                        term(sys, x, out)?;
                    }
                    out.push(')');
                }
            }
        }
        RTerm::XLogX(_) => return Err(Error::LogUnsupported),
    }
    Ok(())
}

fn binders(sys: &RealSystem, vs: &[VarId]) -> String {
    vs.iter()
        .map(|v| format!("({} Real)", sys.vars[*v].name))
        .collect::<Vec<_>>()
        .join(" ")
}

fn formula(sys: &RealSystem, f: &RFormula, keep_exists: bool, out: &mut String) -> Result<()> {
    match f {
        RFormula::Atom(a, rel, b) => {
            out.push_str(if *rel == RRel::Eq { "(= " } else { "(<= " });
            term(sys, a, out)?;
            out.push(' ');
            term(sys, b, out)?;
            out.push(')');
        }
        RFormula::Not(b) => {
            out.push_str("(not ");
            formula(sys, b, keep_exists, out)?;
            out.push(')');
        }
        RFormula::And(bs) | RFormula::Or(bs) => {
            let (op, unit) = if matches!(f, RFormula::And(_)) {
                ("and", "true")
            } else {
                ("or", "false")
            };
            match bs.len() {
                0 => out.push_str(unit),
                1 => formula(sys, &bs[0], keep_exists, out)?,
                _ => {
                    write!(out, "({op}").expect("string");
                    for b in bs {
                        out.push(' ');
                        formula(sys, b, keep_exists, out)?;
                    }
                    out.push(')');
                }
            }
        }
        RFormula::Exists(vs, b) | RFormula::Forall(vs, b) => {
            if !keep_exists && matches!(f, RFormula::Exists(..)) {
                return formula(sys, b, keep_exists, out);
            }
            let q = if matches!(f, RFormula::Exists(..)) {
                "exists"
            } else {
                "forall"
            };
            write!(out, "({q} ({}) ", binders(sys, vs)).expect("string");
            formula(sys, b, keep_exists, out)?;
            out.push(')');
        }
    }
    Ok(())
}

fn collect_exists(f: &RFormula, out: &mut Vec<VarId>) {
    match f {
        RFormula::Exists(vs, b) => {
            out.extend(vs);
            collect_exists(b, out);
        }
        RFormula::And(bs) => bs.iter().for_each(|b| collect_exists(b, out)),
        _ => {}
    }
}

/// SMT-LIB2 script for a system without log terms. Existential systems are
/// lowered to declarations plus quantifier-free assertions; other systems
/// keep their binders below the outer weights.
pub fn emit_smtlib2(sys: &RealSystem) -> Result<String> {
    if sys.fragment.has_log() {
        return Err(Error::LogUnsupported);
    }
    let existential = sys.fragment.is_existential();
    let mut out = String::new();
    writeln!(out, "; fragment {} mode {}", sys.fragment, sys.mode).expect("string");
    if !sys.free_vars.is_empty() {
        writeln!(out, "; outer variables over ({})", sys.free_vars.join(", ")).expect("string");
    }
    writeln!(
        out,
        "(set-logic {})",
        if existential { "QF_NRA" } else { "NRA" }
    )
    .expect("string");

    let (declared, body) = match (&sys.body, sys.mode) {
        (RFormula::Exists(vs, b), Mode::Sat) => (vs.clone(), &**b),
        (b, _) => (vec![], b),
    };
    let mut declared = declared;
    if existential {
        collect_exists(body, &mut declared);
    }
    for v in &declared {
        writeln!(out, "(declare-const {} Real)", sys.vars[*v].name).expect("string");
    }
    let conjuncts: Vec<&RFormula> = match body {
        RFormula::And(bs) => bs.iter().collect(),
        other => vec![other],
    };
    for c in conjuncts {
        let mut line = String::new();
        formula(sys, c, !existential, &mut line)?;
        writeln!(out, "(assert {line})").expect("string");
    }
    writeln!(out, "(check-sat)").expect("string");
    if existential {
        writeln!(out, "(get-model)").expect("string");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realc::compile;
    use crate::structure::Structure;
    use crate::syntax::parser::parse;

    #[test]
    fn existential_script_has_no_binders() {
        let st = Structure::new(["a", "b"]).unwrap();
        let sys = compile(
            &st,
            &parse("indep( ; x ; y) \\/ x = y").unwrap(),
            Mode::Sat,
            None,
        )
        .unwrap();
        let text = emit_smtlib2(&sys).unwrap();
        assert!(text.contains("(set-logic QF_NRA)"));
        assert!(text.contains("(declare-const s_v_a_b Real)"));
        assert!(text.contains("(declare-const t1_v_b_a Real)"));
        assert!(!text.contains("exists") && !text.contains("forall"));
        assert!(text.ends_with("(check-sat)\n(get-model)\n"));
        assert_eq!(text, emit_smtlib2(&sys).unwrap());
    }

    #[test]
    fn full_script_keeps_binders() {
        let mut st = Structure::new(["a", "b"]).unwrap();
        st.set_constant("a", "a").unwrap();
        st.set_constant("b", "b").unwrap();
        let sys = compile(
            &st,
            &parse("~(x = @a \\/ x = @b)").unwrap(),
            Mode::Sat,
            None,
        )
        .unwrap();
        let text = emit_smtlib2(&sys).unwrap();
        assert!(text.contains("(set-logic NRA)"));
        assert!(
            text.contains("(not (exists ((t1_v_a Real) (t1_v_b Real) (r1_v_a Real) (r1_v_b Real))")
        );
    }

    #[test]
    fn log_is_rejected() {
        let st = Structure::with_size(2).unwrap();
        let sys = compile(&st, &parse("entropy(x ; y)").unwrap(), Mode::Sat, None).unwrap();
        assert_eq!(emit_smtlib2(&sys), Err(Error::LogUnsupported));
        assert_eq!(
            rational(&Rational::new((-3).into(), 4.into())),
            "(- (/ 3 4))"
        );
    }
}
