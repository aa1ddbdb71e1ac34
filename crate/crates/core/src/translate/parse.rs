//! Parser for the second-order text format printed by [`super::ast`].

use crate::error::{Error, Result};
use crate::syntax::ast::{Term, Var};

use super::ast::{NumTerm, SoFormula};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Const(String),
    Num(String),
    Sym(&'static str),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let ident_char = |c: char| c.is_alphanumeric() || c == '_' || c == '#' || c == '\'';
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '!' && chars.get(i + 1) == Some(&'=') {
            out.push((Tok::Sym("!="), start));
            i += 2;
            continue;
        }
        if let Some(sym) = [
            "(", ")", "[", "]", ",", ".", ":", "=", "*", "+", "&", "|", "!",
        ]
        .iter()
        .find(|s| s.starts_with(c))
        {
            out.push((Tok::Sym(sym), start));
            i += 1;
            continue;
        }
        if c == '@' {
            i += 1;
            while i < chars.len() && ident_char(chars[i]) {
                i += 1;
            }
            out.push((Tok::Const(chars[start + 1..i].iter().collect()), start));
            continue;
        }
        if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Num(chars[start..i].iter().collect()), start));
            continue;
        }
        if ident_char(c) {
            while i < chars.len() && ident_char(chars[i]) {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
            continue;
        }
        return Err(Error::Syntax {
            line: 1,
            column: start + 1,
            message: format!("unexpected character `{c}`"),
        });
    }
    Ok(out)
}

pub fn parse_so(text: &str) -> Result<SoFormula> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        len: text.len(),
    };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn error(&self, message: &str) -> Error {
        let at = self.toks.get(self.pos).map_or(self.len, |t| t.1);
        Error::Syntax {
            line: 1,
            column: at + 1,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.0)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{s}`")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(name)
            }
            _ => Err(self.error("expected an identifier")),
        }
    }

    fn formula(&mut self) -> Result<SoFormula> {
        let mut left = self.conj()?;
        while self.eat("|") {
            let right = self.conj()?;
            left = SoFormula::or(left, right);
        }
        Ok(left)
    }

    fn conj(&mut self) -> Result<SoFormula> {
        let mut left = self.unary()?;
        while self.eat("&") {
            let right = self.unary()?;
            left = SoFormula::and(left, right);
        }
        Ok(left)
    }

    fn fn_quantifier(&self) -> Option<(bool, String)> {
        if let (Some(Tok::Ident(name)), Some(Tok::Sym(":"))) = (self.peek(), self.peek_at(1)) {
            let exists = name.starts_with('E');
            if (exists || name.starts_with('A')) && name.len() > 1 {
                return Some((exists, name[1..].to_string()));
            }
        }
        None
    }

    fn unary(&mut self) -> Result<SoFormula> {
        if let Some((exists, name)) = self.fn_quantifier() {
            self.pos += 2;
            let arity = match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    n.parse::<usize>().map_err(|_| self.error("bad arity"))?
                }
                _ => return Err(self.error("expected an arity")),
            };
            self.expect(".")?;
            let body = Box::new(self.formula()?);
            return Ok(if exists {
                SoFormula::ExistsFn(name, arity, body)
            } else {
                SoFormula::ForallFn(name, arity, body)
            });
        }
        if let Some(Tok::Ident(kw)) = self.peek() {
            if kw == "forall" || kw == "exists" {
                let exists = kw == "exists";
                self.pos += 1;
                let v = self.ident()?;
                self.expect(".")?;
                let body = Box::new(self.formula()?);
                return Ok(if exists {
                    SoFormula::Exists(v, body)
                } else {
                    SoFormula::Forall(v, body)
                });
            }
        }
        if self.is_sym("(") {
            let save = self.pos;
            self.pos += 1;
            if let Ok(f) = self.formula() {
                if self.eat(")") && !matches!(self.peek(), Some(Tok::Sym("=" | "!=" | "*" | "+"))) {
                    return Ok(f);
                }
            }
            self.pos = save;
            return self.equation();
        }
        if self.eat("!") {
            let name = self.ident()?;
            let args = self.args()?;
            return Ok(SoFormula::Rel {
                name,
                args,
                negated: true,
            });
        }
        match (self.peek().cloned(), self.peek_at(1).cloned()) {
            (Some(Tok::Ident(name)), Some(Tok::Sym("("))) if name != "SUM" && name != "log" => {
                let save = self.pos;
                self.pos += 1;
                let args = self.args()?;
                if matches!(self.peek(), Some(Tok::Sym("=" | "!=" | "*" | "+"))) {
                    self.pos = save;
                    return self.equation();
                }
                Ok(SoFormula::Rel {
                    name,
                    args,
                    negated: false,
                })
            }
            (Some(Tok::Ident(name)), _) if name != "SUM" && name != "log" => self.fo_equation(),
            (Some(Tok::Const(_)), _) => self.fo_equation(),
            _ => self.equation(),
        }
    }

    fn fo_term(&mut self) -> Result<Term> {
        match self.peek().cloned() {
            Some(Tok::Ident(v)) => {
                self.pos += 1;
                Ok(Term::Var(v))
            }
            Some(Tok::Const(c)) => {
                self.pos += 1;
                Ok(Term::Const(c))
            }
            _ => Err(self.error("expected a variable or constant")),
        }
    }

    fn fo_equation(&mut self) -> Result<SoFormula> {
        let left = self.fo_term()?;
        let negated = if self.eat("!=") {
            true
        } else {
            self.expect("=")?;
            false
        };
        let right = self.fo_term()?;
        Ok(SoFormula::Eq {
            left,
            right,
            negated,
        })
    }

    fn args(&mut self) -> Result<Vec<Term>> {
        self.expect("(")?;
        let mut out = Vec::new();
        if self.eat(")") {
            return Ok(out);
        }
        loop {
            out.push(self.fo_term()?);
            if self.eat(")") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn equation(&mut self) -> Result<SoFormula> {
        let left = self.sum()?;
        let negated = if self.eat("!=") {
            true
        } else {
            self.expect("=")?;
            false
        };
        let right = self.sum()?;
        Ok(SoFormula::NumEq {
            left,
            right,
            negated,
        })
    }

    fn sum(&mut self) -> Result<NumTerm> {
        let mut left = self.product()?;
        while self.eat("+") {
            let right = self.product()?;
            left = NumTerm::Add(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn product(&mut self) -> Result<NumTerm> {
        let mut left = self.primary()?;
        while self.eat("*") {
            let right = self.primary()?;
            left = NumTerm::mul(left, right);
        }
        Ok(left)
    }

    fn primary(&mut self) -> Result<NumTerm> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) if n == "0" || n == "1" => {
                self.pos += 1;
                Ok(if n == "0" {
                    NumTerm::Zero
                } else {
                    NumTerm::One
                })
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let t = self.sum()?;
                self.expect(")")?;
                Ok(t)
            }
            Some(Tok::Ident(kw)) if kw == "SUM" => {
                self.pos += 1;
                self.expect("[")?;
                let mut vars: Vec<Var> = Vec::new();
                while !self.eat("]") {
                    vars.push(self.ident()?);
                }
                self.expect("(")?;
                let body = self.sum()?;
                self.expect(")")?;
                Ok(NumTerm::Sum(vars, Box::new(body)))
            }
            Some(Tok::Ident(kw)) if kw == "log" => {
                self.pos += 1;
                self.expect("(")?;
                let body = self.sum()?;
                self.expect(")")?;
                Ok(NumTerm::Log(Box::new(body)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let args = self.args()?;
                Ok(NumTerm::App(name, args))
            }
            _ => Err(self.error("expected a numeric term")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::parse;
    use crate::translate::to_so::translate_so;

    #[test]
    fn roundtrips() {
        for text in [
            "R(x) \\/ indep( ; x ; y)",
            "exists z. ~indep(z ; x ; y) & forall u. x = u",
            "~(R(x) \\/ !R(x))",
            "indep(x ; y ; y)",
        ] {
            let so = translate_so(&parse(text).unwrap()).unwrap().formula;
            let printed = so.to_string();
            assert_eq!(parse_so(&printed).unwrap(), so, "{printed}");
        }
    }

    #[test]
    fn numeric_forms() {
        let f = parse_so("(f(x) + g(x)) * 1 = log(SUM[x] (f(x)))").unwrap();
        assert_eq!(f.to_string(), "(f(x) + g(x)) * 1 = log(SUM[x] (f(x)))");
        assert_eq!(
            parse_so("(x = y) & (R(x) | x != @one)")
                .unwrap()
                .to_string(),
            "x = y & (R(x) | x != @one)"
        );
        assert!(parse_so("f(x) =").is_err());
    }
}
