use std::fmt;

use super::ParseError;

/// 1-based line and column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u32),
    Assign,   // :=
    Colon,    // :
    Arrow,    // ->
    Implies,  // =>
    Eq,       // =
    Neq,      // !=
    Not,      // ~ or !
    And,      // &
    Or,       // |
    Choice,   // |~|
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    DotDot,
    Question,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Assign => f.write_str("`:=`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Implies => f.write_str("`=>`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Neq => f.write_str("`!=`"),
            Tok::Not => f.write_str("`~`"),
            Tok::And => f.write_str("`&`"),
            Tok::Or => f.write_str("`|`"),
            Tok::Choice => f.write_str("`|~|`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::DotDot => f.write_str("`..`"),
            Tok::Question => f.write_str("`?`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `.gap` source into tokens. Layout is free-form: every statement
/// starts with a keyword, so newlines carry no meaning.
///
/// Identifiers may contain a single interior `.` (`mem1.addrBus`); that
/// form is reserved for variables introduced by array elimination.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let mut adv = 1;
        let tok = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            ':' if chars.get(i + 1) == Some(&'=') => {
                adv = 2;
                Tok::Assign
            }
            ':' => Tok::Colon,
            '-' if chars.get(i + 1) == Some(&'>') => {
                adv = 2;
                Tok::Arrow
            }
            '=' if chars.get(i + 1) == Some(&'>') => {
                adv = 2;
                Tok::Implies
            }
            '=' => Tok::Eq,
            '!' if chars.get(i + 1) == Some(&'=') => {
                adv = 2;
                Tok::Neq
            }
            '!' | '~' => Tok::Not,
            '&' => Tok::And,
            '|' if chars.get(i + 1) == Some(&'~') && chars.get(i + 2) == Some(&'|') => {
                adv = 3;
                Tok::Choice
            }
            '|' => Tok::Or,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '?' => Tok::Question,
            '.' if chars.get(i + 1) == Some(&'.') => {
                adv = 2;
                Tok::DotDot
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i + adv < chars.len() && chars[i + adv].is_ascii_digit() {
                    adv += 1;
                }
                let text: String = chars[start..start + adv].iter().collect();
                let n = text.parse().map_err(|_| ParseError::new(pos, "integer literal too large"))?;
                Tok::Int(n)
            }
            c if ident_start(c) => {
                let start = i;
                let mut end = i + 1;
                while end < chars.len() && ident_continue(chars[end]) {
                    end += 1;
                }
                if end + 1 < chars.len() && chars[end] == '.' && ident_start(chars[end + 1]) {
                    end += 1;
                    while end < chars.len() && ident_continue(chars[end]) {
                        end += 1;
                    }
                }
                adv = end - start;
                Tok::Ident(chars[start..end].iter().collect())
            }
            other => return Err(ParseError::new(pos, format!("unexpected character `{other}`"))),
        };
        out.push(Token { tok, pos });
        i += adv;
        col += adv;
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_and_idents() {
        assert_eq!(
            toks("a[x] := y |~| b := ~c | d # comment"),
            vec![
                Tok::Ident("a".into()),
                Tok::LBracket,
                Tok::Ident("x".into()),
                Tok::RBracket,
                Tok::Assign,
                Tok::Ident("y".into()),
                Tok::Choice,
                Tok::Ident("b".into()),
                Tok::Assign,
                Tok::Not,
                Tok::Ident("c".into()),
                Tok::Or,
                Tok::Ident("d".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn dotted_identifier_and_range() {
        assert_eq!(
            toks("mem1.addrBus {0..2}"),
            vec![
                Tok::Ident("mem1.addrBus".into()),
                Tok::LBrace,
                Tok::Int(0),
                Tok::DotDot,
                Tok::Int(2),
                Tok::RBrace,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn reports_position() {
        let err = tokenize("bool a\n  $").unwrap_err();
        assert_eq!(err.pos, Pos { line: 2, col: 3 });
    }
}
