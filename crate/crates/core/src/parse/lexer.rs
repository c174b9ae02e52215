use crate::diag::{Code, Diagnostic, Position};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    Int(u32),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Dot,
    /// `->`
    Arrow,
    /// `~>`
    Squiggle,
    /// `-o`
    NegArrow,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(_) => "string".into(),
            Tok::Int(n) => format!("`{n}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Squiggle => "`~>`".into(),
            Tok::NegArrow => "`-o`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Position,
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_char(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn pos(&self) -> Position {
        Position::new(self.line, self.col)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }
}

fn syntax(pos: Position, message: impl Into<String>) -> Diagnostic {
    Diagnostic::new(Code::Syntax, message).at(pos)
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        let pos = cur.pos();
        match c {
            c if c.is_whitespace() => {
                cur.bump();
            }
            '#' => {
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
            }
            '{' | '}' | '(' | ')' | ',' | '.' => {
                cur.bump();
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    _ => Tok::Dot,
                };
                out.push(Token { tok, pos });
            }
            '-' => {
                cur.bump();
                match cur.peek() {
                    Some('>') => {
                        cur.bump();
                        out.push(Token { tok: Tok::Arrow, pos });
                    }
                    Some('o') => {
                        cur.bump();
                        if cur.peek().is_some_and(is_ident_char) {
                            return Err(syntax(pos, "expected `-o` followed by whitespace"));
                        }
                        out.push(Token { tok: Tok::NegArrow, pos });
                    }
                    _ => return Err(syntax(pos, "expected `->` or `-o` after `-`")),
                }
            }
            '~' => {
                cur.bump();
                if cur.peek() != Some('>') {
                    return Err(syntax(pos, "expected `~>`"));
                }
                cur.bump();
                out.push(Token { tok: Tok::Squiggle, pos });
            }
            '"' => {
                cur.bump();
                let mut s = String::new();
                loop {
                    match cur.bump() {
                        None | Some('\n') => return Err(syntax(pos, "unterminated string")),
                        Some('"') => break,
                        Some('\\') => match cur.bump() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            _ => return Err(syntax(cur.pos(), "unknown escape in string")),
                        },
                        Some(c) => s.push(c),
                    }
                }
                out.push(Token { tok: Tok::Str(s), pos });
            }
            c if c.is_ascii_digit() => {
                let mut n: u32 = 0;
                while let Some(d) = cur.peek().and_then(|c| c.to_digit(10)) {
                    cur.bump();
                    n = n
                        .checked_mul(10)
                        .and_then(|n| n.checked_add(d))
                        .ok_or_else(|| syntax(pos, "integer literal too large"))?;
                }
                if cur.peek().is_some_and(is_ident_char) {
                    return Err(syntax(pos, "identifiers may not start with a digit"));
                }
                out.push(Token { tok: Tok::Int(n), pos });
            }
            c if is_ident_start(c) => {
                let mut s = String::new();
                while let Some(c) = cur.peek() {
                    if !is_ident_char(c) {
                        break;
                    }
                    s.push(c);
                    cur.bump();
                }
                out.push(Token { tok: Tok::Ident(s), pos });
            }
            other => return Err(syntax(pos, format!("unexpected character {other:?}"))),
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: cur.pos(),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str) -> Vec<Tok> {
        lex(text).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_and_comments() {
        assert_eq!(
            toks("a.b -> c ~> d -o E5 # trailing"),
            vec![
                Tok::Ident("a".into()),
                Tok::Dot,
                Tok::Ident("b".into()),
                Tok::Arrow,
                Tok::Ident("c".into()),
                Tok::Squiggle,
                Tok::Ident("d".into()),
                Tok::NegArrow,
                Tok::Ident("E5".into()),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn crlf_positions() {
        let tokens = lex("model\r\n  \"x\"").unwrap();
        assert_eq!(tokens[1].pos, Position::new(2, 3));
        assert_eq!(tokens[1].tok, Tok::Str("x".into()));
    }

    #[test]
    fn bad_input_is_positioned() {
        let err = lex("ok\n  @").unwrap_err();
        assert_eq!(err.code, Code::Syntax);
        assert_eq!(err.position, Some(Position::new(2, 3)));
        assert!(lex("\"open").is_err());
        assert!(lex("99999999999").is_err());
        assert!(lex("-x").is_err());
    }
}
