//! Recursive-descent parser.
//!
//! ```text
//! formula  := orexp
//! orexp    := andexp (("\/" | "||") andexp)*
//! andexp   := unary ("&" unary)*
//! unary    := "~" unary | "not" unary | quant | primary
//! quant    := ("exists" | "forall" | "E1" | "A1") ident "." formula
//! primary  := "(" formula ")" | "!" literal | atom
//! atom     := literal | team-atom | "cmp" "(" cond "|" cond "<=" cond "|" cond ")"
//! literal  := ident "(" [term ("," term)*] ")" | term ("=" | "!=") term
//! term     := ident | "@" ident
//! ```

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::syntax::ast::{AstPath, Condition, Formula, Term, Var};
use crate::syntax::lexer::{syntax_error, tokenize, Pos, Tok, Token};

/// Source range of an AST node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

pub type Spans = BTreeMap<AstPath, Span>;

const KEYWORDS: &[&str] = &[
    "exists", "forall", "E1", "A1", "not", "indep", "dep", "marg", "entropy", "cmp",
];

pub fn parse(text: &str) -> Result<Formula> {
    parse_spanned(text).map(|(f, _)| f)
}

/// Parses and also returns the source span of every node, keyed by AST path.
pub fn parse_spanned(text: &str) -> Result<(Formula, Spans)> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, i: 0 };
    let node = p.formula()?;
    p.expect(&Tok::Eof)?;
    let mut spans = Spans::new();
    let f = node.finish(AstPath::root(), &mut spans);
    Ok((f, spans))
}

pub fn parse_condition(text: &str) -> Result<Condition> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, i: 0 };
    let c = p.condition()?;
    p.expect(&Tok::Eof)?;
    Ok(c)
}

/// Parse tree carrying spans; converted to a plain [`Formula`] afterwards.
struct Node {
    span: Span,
    kind: Kind,
}

enum Kind {
    Leaf(Formula),
    Unary(fn(Box<Formula>) -> Formula, Box<Node>),
    Quant(fn(Var, Box<Formula>) -> Formula, Var, Box<Node>),
    Binary(
        fn(Box<Formula>, Box<Formula>) -> Formula,
        Box<Node>,
        Box<Node>,
    ),
}

impl Node {
    fn finish(self, path: AstPath, spans: &mut Spans) -> Formula {
        spans.insert(path.clone(), self.span);
        match self.kind {
            Kind::Leaf(f) => f,
            Kind::Unary(mk, c) => mk(Box::new(c.finish(path.child(0), spans))),
            Kind::Quant(mk, v, c) => mk(v, Box::new(c.finish(path.child(0), spans))),
            Kind::Binary(mk, a, b) => {
                let a = a.finish(path.child(0), spans);
                let b = b.finish(path.child(1), spans);
                mk(Box::new(a), Box::new(b))
            }
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn last_end(&self) -> usize {
        if self.i == 0 {
            0
        } else {
            self.toks[self.i - 1].end
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(syntax_error(self.pos(), msg))
    }

    fn expect(&mut self, t: &Tok) -> Result<()> {
        if self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!(
                "expected {}, found {}",
                t.describe(),
                self.peek().describe()
            ))
        }
    }

    fn span_from(&self, start: Pos) -> Span {
        Span {
            line: start.line,
            column: start.column,
            start: start.offset,
            end: self.last_end(),
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn formula(&mut self) -> Result<Node> {
        let start = self.pos();
        let mut left = self.and_exp()?;
        loop {
            let mk: fn(Box<Formula>, Box<Formula>) -> Formula = match self.peek() {
                Tok::SplitOr => Formula::SplitOr,
                Tok::GlobalOr => Formula::GlobalOr,
                _ => break,
            };
            self.bump();
            let right = self.and_exp()?;
            left = Node {
                span: self.span_from(start),
                kind: Kind::Binary(mk, Box::new(left), Box::new(right)),
            };
        }
        Ok(left)
    }

    fn and_exp(&mut self) -> Result<Node> {
        let start = self.pos();
        let mut left = self.unary()?;
        while self.peek() == &Tok::Amp {
            self.bump();
            let right = self.unary()?;
            left = Node {
                span: self.span_from(start),
                kind: Kind::Binary(Formula::And, Box::new(left), Box::new(right)),
            };
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Node> {
        let start = self.pos();
        if self.peek() == &Tok::Tilde || self.is_kw("not") {
            let mk: fn(Box<Formula>) -> Formula = if self.peek() == &Tok::Tilde {
                Formula::BoolNeg
            } else {
                Formula::DotNeg
            };
            self.bump();
            let inner = self.unary()?;
            return Ok(Node {
                span: self.span_from(start),
                kind: Kind::Unary(mk, Box::new(inner)),
            });
        }
        let quant: Option<fn(Var, Box<Formula>) -> Formula> = match self.peek() {
            Tok::Ident(s) if s == "exists" => Some(Formula::Exists),
            Tok::Ident(s) if s == "forall" => Some(Formula::Forall),
            Tok::Ident(s) if s == "E1" => Some(Formula::Exists1),
            Tok::Ident(s) if s == "A1" => Some(Formula::Forall1),
            _ => None,
        };
        if let Some(mk) = quant {
            self.bump();
            let v = self.var()?;
            self.expect(&Tok::Dot)?;
            let body = self.formula()?;
            return Ok(Node {
                span: self.span_from(start),
                kind: Kind::Quant(mk, v, Box::new(body)),
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Node> {
        let start = self.pos();
        if self.peek() == &Tok::LParen {
            self.bump();
            let mut inner = self.formula()?;
            self.expect(&Tok::RParen)?;
            inner.span = self.span_from(start);
            return Ok(inner);
        }
        if self.peek() == &Tok::Bang {
            self.bump();
            let f = match self.literal()? {
                Formula::Rel {
                    name,
                    args,
                    negated,
                } => Formula::Rel {
                    name,
                    args,
                    negated: !negated,
                },
                Formula::Eq {
                    left,
                    right,
                    negated,
                } => Formula::Eq {
                    left,
                    right,
                    negated: !negated,
                },
                _ => unreachable!("literal() returns literals"),
            };
            return Ok(Node {
                span: self.span_from(start),
                kind: Kind::Leaf(f),
            });
        }
        let f = match self.peek().clone() {
            Tok::Ident(s) if s == "indep" && self.peek_at(1) == &Tok::LParen => {
                self.bump();
                self.bump();
                let cond = self.var_list(true)?;
                self.expect(&Tok::Semi)?;
                let left = self.var_list(false)?;
                self.expect(&Tok::Semi)?;
                let right = self.var_list(false)?;
                self.expect(&Tok::RParen)?;
                Formula::Indep { cond, left, right }
            }
            Tok::Ident(s)
                if matches!(s.as_str(), "dep" | "marg" | "entropy")
                    && self.peek_at(1) == &Tok::LParen =>
            {
                self.bump();
                self.bump();
                let lhs = self.var_list(s == "dep")?;
                self.expect(&Tok::Semi)?;
                let rhs = self.var_list(false)?;
                self.expect(&Tok::RParen)?;
                match s.as_str() {
                    "dep" => Formula::Dep { lhs, rhs },
                    "marg" => {
                        if lhs.len() != rhs.len() {
                            return Err(Error::MargArity(lhs.len(), rhs.len()));
                        }
                        Formula::Marg { lhs, rhs }
                    }
                    _ => Formula::Entropy { lhs, rhs },
                }
            }
            Tok::Ident(s) if s == "cmp" && self.peek_at(1) == &Tok::LParen => {
                self.bump();
                self.bump();
                let c0 = self.condition()?;
                self.expect(&Tok::Pipe)?;
                let c1 = self.condition()?;
                self.expect(&Tok::Le)?;
                let c2 = self.condition()?;
                self.expect(&Tok::Pipe)?;
                let c3 = self.condition()?;
                self.expect(&Tok::RParen)?;
                Formula::cmp(c0, c1, c2, c3)
            }
            _ => self.literal()?,
        };
        Ok(Node {
            span: self.span_from(start),
            kind: Kind::Leaf(f),
        })
    }

    fn var(&mut self) -> Result<Var> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            other => self.err(format!("expected a variable, found {}", other.describe())),
        }
    }

    fn var_list(&mut self, allow_empty: bool) -> Result<Vec<Var>> {
        let mut out = Vec::new();
        while matches!(self.peek(), Tok::Ident(_)) {
            out.push(self.var()?);
        }
        if out.is_empty() && !allow_empty {
            return self.err(format!(
                "expected a variable list, found {}",
                self.peek().describe()
            ));
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Const(c) => {
                self.bump();
                Ok(Term::Const(c))
            }
            _ => self.var().map(Term::Var),
        }
    }

    fn literal(&mut self) -> Result<Formula> {
        if let (Tok::Ident(name), Tok::LParen) = (self.peek().clone(), self.peek_at(1).clone()) {
            if KEYWORDS.contains(&name.as_str()) {
                return self.err(format!("`{name}` is a keyword"));
            }
            self.bump();
            self.bump();
            let mut args = Vec::new();
            if self.peek() != &Tok::RParen {
                args.push(self.term()?);
                while self.peek() == &Tok::Comma {
                    self.bump();
                    args.push(self.term()?);
                }
            }
            self.expect(&Tok::RParen)?;
            return Ok(Formula::Rel {
                name,
                args,
                negated: false,
            });
        }
        let left = self.term()?;
        let negated = match self.peek() {
            Tok::Eq => false,
            Tok::Neq => true,
            other => return self.err(format!("expected `=` or `!=`, found {}", other.describe())),
        };
        self.bump();
        let right = self.term()?;
        Ok(Formula::Eq {
            left,
            right,
            negated,
        })
    }

    fn condition(&mut self) -> Result<Condition> {
        let mut left = self.cond_unary()?;
        while self.peek() == &Tok::Amp {
            self.bump();
            let right = self.cond_unary()?;
            left = Condition::and(left, right);
        }
        Ok(left)
    }

    fn cond_unary(&mut self) -> Result<Condition> {
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let c = self.condition()?;
                self.expect(&Tok::RParen)?;
                Ok(c)
            }
            Tok::Bang if self.peek_at(1) == &Tok::LParen => {
                self.bump();
                self.bump();
                let c = self.condition()?;
                self.expect(&Tok::RParen)?;
                Ok(Condition::not(c))
            }
            Tok::Bang => {
                self.bump();
                Ok(negate_literal(literal_to_condition(self.literal()?)))
            }
            _ => Ok(literal_to_condition(self.literal()?)),
        }
    }
}

fn literal_to_condition(f: Formula) -> Condition {
    match f {
        Formula::Rel {
            name,
            args,
            negated,
        } => Condition::Rel {
            name,
            args,
            negated,
        },
        Formula::Eq {
            left,
            right,
            negated,
        } => Condition::Eq {
            left,
            right,
            negated,
        },
        _ => unreachable!("literal() returns literals"),
    }
}

fn negate_literal(c: Condition) -> Condition {
    match c {
        Condition::Rel {
            name,
            args,
            negated,
        } => Condition::Rel {
            name,
            args,
            negated: !negated,
        },
        Condition::Eq {
            left,
            right,
            negated,
        } => Condition::Eq {
            left,
            right,
            negated: !negated,
        },
        other => Condition::not(other),
    }
}
