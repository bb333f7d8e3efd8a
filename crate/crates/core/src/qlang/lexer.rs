use crate::algebra::CmpOp;

use super::parser::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    /// `dim<N>`
    Dim(usize),
    Int(i64),
    Float(f64),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Dot,
    Cmp(CmpOp),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Dim(n) => format!("`dim{n}`"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::Float(x) => format!("float {x:?}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Cmp(op) => format!("`{op}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut lx = Lexer { src, pos: 0 };
    let mut out = Vec::new();
    loop {
        let token = lx.next_token()?;
        let done = token.tok == Tok::Eof;
        out.push(token);
        if done {
            return Ok(out);
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn error(&self, at: usize, found: impl Into<String>, expected: &[&str]) -> ParseError {
        ParseError::new(self.src, at, found.into(), expected.iter().map(|s| s.to_string()).collect())
    }

    fn next_token(&mut self) -> Result<Token, ParseError> {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok(Token {
                tok: Tok::Eof,
                start,
                end: start,
            });
        };
        let single = |tok| (tok, 1);
        let (tok, len) = match c {
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            '{' => single(Tok::LBrace),
            '}' => single(Tok::RBrace),
            '[' => single(Tok::LBracket),
            ']' => single(Tok::RBracket),
            ',' => single(Tok::Comma),
            ':' => single(Tok::Colon),
            '.' => single(Tok::Dot),
            '=' if self.peek_at(1) == Some('=') => (Tok::Cmp(CmpOp::Eq), 2),
            '=' => single(Tok::Cmp(CmpOp::Eq)),
            '!' if self.peek_at(1) == Some('=') => (Tok::Cmp(CmpOp::Ne), 2),
            '<' if self.peek_at(1) == Some('=') => (Tok::Cmp(CmpOp::Le), 2),
            '<' if self.peek_at(1) == Some('>') => (Tok::Cmp(CmpOp::Ne), 2),
            '<' => single(Tok::Cmp(CmpOp::Lt)),
            '>' if self.peek_at(1) == Some('=') => (Tok::Cmp(CmpOp::Ge), 2),
            '>' => single(Tok::Cmp(CmpOp::Gt)),
            '"' => return self.string(start),
            '-' | '0'..='9' => return self.number(start),
            c if is_ident_start(c) => return Ok(self.ident(start)),
            other => {
                return Err(self.error(start, format!("character {other:?}"), &["a token"]));
            }
        };
        self.pos += len;
        Ok(Token {
            tok,
            start,
            end: self.pos,
        })
    }

    fn ident(&mut self, start: usize) -> Token {
        while self.peek().is_some_and(is_ident_char) {
            self.bump();
        }
        let word = &self.src[start..self.pos];
        let tok = match word.strip_prefix("dim") {
            Some(n) if !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()) => match n.parse() {
                Ok(d) => Tok::Dim(d),
                Err(_) => Tok::Ident(word.to_string()),
            },
            _ if word == "inf" => Tok::Float(f64::INFINITY),
            _ => Tok::Ident(word.to_string()),
        };
        Token {
            tok,
            start,
            end: self.pos,
        }
    }

    fn digits(&mut self) -> usize {
        let n = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        self.pos += n;
        n
    }

    fn number(&mut self, start: usize) -> Result<Token, ParseError> {
        let negative = self.peek() == Some('-');
        if negative {
            self.bump();
            if self.rest().starts_with("inf") && !self.peek_at(3).is_some_and(is_ident_char) {
                self.pos += 3;
                return Ok(Token {
                    tok: Tok::Float(f64::NEG_INFINITY),
                    start,
                    end: self.pos,
                });
            }
        }
        if self.digits() == 0 {
            return Err(self.error(start, "`-`", &["a number"]));
        }
        let mut is_float = false;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            self.digits();
            is_float = true;
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.bump();
            if matches!(self.peek(), Some('+' | '-')) {
                self.bump();
            }
            if self.digits() == 0 {
                self.pos = save;
            } else {
                is_float = true;
            }
        }
        let text = &self.src[start..self.pos];
        let tok = if is_float {
            Tok::Float(
                text.parse()
                    .map_err(|_| self.error(start, format!("`{text}`"), &["a float"]))?,
            )
        } else {
            Tok::Int(
                text.parse()
                    .map_err(|_| self.error(start, format!("`{text}`"), &["a 64-bit integer"]))?,
            )
        };
        Ok(Token {
            tok,
            start,
            end: self.pos,
        })
    }

    fn string(&mut self, start: usize) -> Result<Token, ParseError> {
        self.bump();
        let mut out = String::new();
        loop {
            let at = self.pos;
            match self.bump() {
                None => return Err(self.error(at, "end of input", &["`\"`"])),
                Some('"') => break,
                Some('\\') => match self.bump() {
                    Some('"') => out.push('"'),
                    Some('\\') => out.push('\\'),
                    Some('n') => out.push('\n'),
                    Some('r') => out.push('\r'),
                    Some('t') => out.push('\t'),
                    Some('u') if self.peek() == Some('{') => {
                        self.bump();
                        let hex_start = self.pos;
                        while self.peek().is_some_and(|c| c.is_ascii_hexdigit()) {
                            self.bump();
                        }
                        let hex = &self.src[hex_start..self.pos];
                        let ch = u32::from_str_radix(hex, 16).ok().and_then(char::from_u32);
                        match (ch, self.bump()) {
                            (Some(ch), Some('}')) => out.push(ch),
                            _ => return Err(self.error(at, "malformed `\\u` escape", &["`\\u{hex}`"])),
                        }
                    }
                    _ => return Err(self.error(at, "unknown escape", &["a string escape"])),
                },
                Some(c) => out.push(c),
            }
        }
        Ok(Token {
            tok: Tok::Str(out),
            start,
            end: self.pos,
        })
    }
}
