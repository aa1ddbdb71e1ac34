use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `@name`
    Const(String),
    LParen,
    RParen,
    Comma,
    Semi,
    Dot,
    Pipe,
    Le,
    Eq,
    Neq,
    Bang,
    Tilde,
    Amp,
    SplitOr,
    GlobalOr,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Const(s) => format!("`@{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Neq => "`!=`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::SplitOr => "`\\/`".into(),
            Tok::GlobalOr => "`||`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
    pub end: usize,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn syntax_error(pos: Pos, message: impl Into<String>) -> Error {
    Error::Syntax {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

pub fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let (mut line, mut col) = (1, 1);
    while i < chars.len() {
        let (off, c) = chars[i];
        let pos = Pos {
            line,
            column: col,
            offset: off,
        };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let peek = chars.get(i + 1).map(|p| p.1);
        let (tok, width) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            ';' => (Tok::Semi, 1),
            '.' => (Tok::Dot, 1),
            '=' => (Tok::Eq, 1),
            '~' => (Tok::Tilde, 1),
            '&' => (Tok::Amp, 1),
            '|' if peek == Some('|') => (Tok::GlobalOr, 2),
            '|' => (Tok::Pipe, 1),
            '<' if peek == Some('=') => (Tok::Le, 2),
            '!' if peek == Some('=') => (Tok::Neq, 2),
            '!' => (Tok::Bang, 1),
            '\\' if peek == Some('/') => (Tok::SplitOr, 2),
            '@' => {
                let mut j = i + 1;
                while j < chars.len() && is_ident_char(chars[j].1) {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(syntax_error(pos, "expected a constant name after `@`"));
                }
                let name: String = chars[i + 1..j].iter().map(|p| p.1).collect();
                (Tok::Const(name), j - i)
            }
            c if is_ident_start(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j].1) {
                    j += 1;
                }
                let name: String = chars[i..j].iter().map(|p| p.1).collect();
                (Tok::Ident(name), j - i)
            }
            other => return Err(syntax_error(pos, format!("unexpected character `{other}`"))),
        };
        let end = chars.get(i + width).map(|p| p.0).unwrap_or(text.len());
        out.push(Token { tok, pos, end });
        i += width;
        col += width;
    }
    let pos = Pos {
        line,
        column: col,
        offset: text.len(),
    };
    out.push(Token {
        tok: Tok::Eof,
        pos,
        end: text.len(),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_positions() {
        let toks = tokenize("a || b\n  \\/ !R(@zero) # c\n<= !=").unwrap();
        let kinds: Vec<Tok> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("a".into()),
                Tok::GlobalOr,
                Tok::Ident("b".into()),
                Tok::SplitOr,
                Tok::Bang,
                Tok::Ident("R".into()),
                Tok::LParen,
                Tok::Const("zero".into()),
                Tok::RParen,
                Tok::Le,
                Tok::Neq,
                Tok::Eof
            ]
        );
        assert_eq!((toks[3].pos.line, toks[3].pos.column), (2, 3));
        assert!(matches!(
            tokenize("x $ y"),
            Err(Error::Syntax {
                line: 1,
                column: 3,
                ..
            })
        ));
    }
}
