//! Recursive-descent parser for the query language.
//!
//! ```text
//! expr     := IDENT | IDENT "(" args ")"
//! indexset := "{" [tuple ("," tuple)*] "}"
//! tuple    := "(" INT ("," INT)* ")"
//! posset   := "{" INT ("," INT)* "}"
//! pred     := and ("or" and)*
//! and      := unary ("and" unary)*
//! unary    := "not" unary | "(" pred ")" | "true" | atom
//! atom     := "val" ["." INT] CMP literal | DIM CMP (INT | DIM)
//! literal  := INT | FLOAT | STRING | "undef" | "(" literal ("," literal)* [","] ")"
//!           | "array" "[" INT "]" "{" [tuple ":" literal ("," tuple ":" literal)*] "}"
//! transf   := "[" [step ("," step)*] "]"
//! onlist   := "on" "(" INT ":" INT ("," INT ":" INT)* ")"
//! ```
//!
//! Operator signatures:
//!
//! | operator | arguments |
//! |---|---|
//! | `project` | expr, indexset |
//! | `select` | expr, pred |
//! | `cross`, `union` | expr, expr |
//! | `transform` | expr, transf |
//! | `equijoin`, `semijoin`, `antijoin` | expr, expr [, onlist] |
//! | `vpartition` | expr, pred, ... |
//! | `hpartition` | expr, posset, ... |
//! | `reassemble` | expr |
//! | `fragment` | expr, INT |
//!
//! Steps are `permute(p0,p1,..)`, `translate(d, k)`, `insert(p, c)`,
//! `remove(p)`, `compact(d)`, `remap(d, {from: to, ..})` and
//! `restore(p, {tuple: c, ..})`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ast::Expr;
use super::lexer::{tokenize, Tok, Token};
use crate::algebra::{JoinKind, Predicate, Step, TransformSpec};
use crate::array::{Array, Index};
use crate::value::Value;

pub const OPERATORS: [&str; 12] = [
    "project",
    "select",
    "cross",
    "transform",
    "union",
    "equijoin",
    "semijoin",
    "antijoin",
    "vpartition",
    "hpartition",
    "reassemble",
    "fragment",
];

/// Words that cannot name an array.
pub const KEYWORDS: [&str; 9] = ["val", "not", "and", "or", "on", "true", "undef", "inf", "array"];

/// Byte range of a node in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    /// Byte offset of the offending token.
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub found: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn new(src: &str, offset: usize, found: String, expected: Vec<String>) -> Self {
        let (line, column) = line_col(src, offset);
        ParseError {
            offset,
            line,
            column,
            found,
            expected,
        }
    }

    /// The offending source line with a caret under the error position.
    pub fn render(&self, src: &str) -> String {
        caret(src, self.offset, &self.to_string())
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: expected ", self.line, self.column)?;
        match self.expected.as_slice() {
            [] => f.write_str("something else")?,
            [one] => f.write_str(one)?,
            [a, b] => write!(f, "{a} or {b}")?,
            many => {
                let (last, init) = many.split_last().unwrap();
                write!(f, "one of {} or {last}", init.join(", "))?;
            }
        }
        write!(f, ", found {}", self.found)
    }
}

pub(crate) fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Renders `message` under the source line containing `offset`.
pub fn caret(src: &str, offset: usize, message: &str) -> String {
    let (line, column) = line_col(src, offset);
    let text = src.lines().nth(line - 1).unwrap_or("");
    format!(
        "{message}\n  | {text}\n  | {}^",
        " ".repeat(column.saturating_sub(1))
    )
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    parse_with_spans(src).map(|(e, _)| e)
}

/// Parses and also returns the source span of every node, in pre-order.
pub fn parse_with_spans(src: &str) -> Result<(Expr, Vec<Span>), ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok((e, p.spans))
}

/// Parses a standalone predicate, as accepted inside `select(...)`.
pub fn parse_predicate(src: &str) -> Result<Predicate, ParseError> {
    let mut p = Parser::new(src)?;
    let pred = p.pred()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(pred)
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    spans: Vec<Span>,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> PResult<Self> {
        Ok(Parser {
            src,
            tokens: tokenize(src)?,
            pos: 0,
            spans: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.tokens[(self.pos + 1).min(self.tokens.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, expected: &[&str]) -> ParseError {
        let t = &self.tokens[self.pos];
        ParseError::new(
            self.src,
            t.start,
            t.tok.describe(),
            expected.iter().map(|s| s.to_string()).collect(),
        )
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<Token> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.error_here(&[what]))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == word)
    }

    fn comma(&mut self) -> PResult<()> {
        self.expect(Tok::Comma, "`,`").map(drop)
    }

    fn int(&mut self) -> PResult<i64> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.error_here(&["an integer"])),
        }
    }

    fn uint(&mut self) -> PResult<usize> {
        match *self.peek() {
            Tok::Int(n) if n >= 0 => {
                self.bump();
                usize::try_from(n).map_err(|_| self.error_here(&["a small non-negative integer"]))
            }
            _ => Err(self.error_here(&["a non-negative integer"])),
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let id = self.spans.len();
        let start = self.tokens[self.pos].start;
        self.spans.push(Span { start, end: start });
        let name = match self.peek() {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => name.clone(),
            _ => return Err(self.error_here(&["an array name", "an operator call"])),
        };
        self.bump();
        let e = if *self.peek() == Tok::LParen {
            self.bump();
            let e = self.call(&name)?;
            self.expect(Tok::RParen, "`)`")?;
            e
        } else {
            Expr::Ref(name)
        };
        self.spans[id].end = self.tokens[self.pos.saturating_sub(1)].end;
        Ok(e)
    }

    fn call(&mut self, name: &str) -> PResult<Expr> {
        let boxed = |e| Box::new(e);
        Ok(match name {
            "project" => {
                let e = self.expr()?;
                self.comma()?;
                Expr::Project(boxed(e), self.index_set()?)
            }
            "select" => {
                let e = self.expr()?;
                self.comma()?;
                Expr::Select(boxed(e), self.pred()?)
            }
            "cross" | "union" => {
                let l = self.expr()?;
                self.comma()?;
                let r = self.expr()?;
                if name == "cross" {
                    Expr::Cross(boxed(l), boxed(r))
                } else {
                    Expr::Union(boxed(l), boxed(r))
                }
            }
            "transform" => {
                let e = self.expr()?;
                self.comma()?;
                Expr::Transform(boxed(e), self.transform_spec()?)
            }
            "equijoin" | "semijoin" | "antijoin" => {
                let kind = match name {
                    "equijoin" => JoinKind::Equi,
                    "semijoin" => JoinKind::Semi,
                    _ => JoinKind::Anti,
                };
                let left = self.expr()?;
                self.comma()?;
                let right = self.expr()?;
                let on = if self.eat(&Tok::Comma) {
                    self.on_list()?
                } else {
                    Vec::new()
                };
                Expr::Join {
                    kind,
                    left: boxed(left),
                    right: boxed(right),
                    on,
                }
            }
            "vpartition" => {
                let e = self.expr()?;
                let mut preds = Vec::new();
                self.comma()?;
                preds.push(self.pred()?);
                while self.eat(&Tok::Comma) {
                    preds.push(self.pred()?);
                }
                Expr::VPartition(boxed(e), preds)
            }
            "hpartition" => {
                let e = self.expr()?;
                let mut slices = Vec::new();
                self.comma()?;
                slices.push(self.position_set()?);
                while self.eat(&Tok::Comma) {
                    slices.push(self.position_set()?);
                }
                Expr::HPartition(boxed(e), slices)
            }
            "reassemble" => Expr::Reassemble(boxed(self.expr()?)),
            "fragment" => {
                let e = self.expr()?;
                self.comma()?;
                Expr::Fragment(boxed(e), self.uint()?)
            }
            _ => {
                let at = self.pos - 2;
                let t = &self.tokens[at];
                return Err(ParseError::new(
                    self.src,
                    t.start,
                    t.tok.describe(),
                    OPERATORS.iter().map(|o| format!("`{o}`")).collect(),
                ));
            }
        })
    }

    fn tuple(&mut self) -> PResult<Index> {
        self.expect(Tok::LParen, "`(`")?;
        let mut coords = vec![self.int()?];
        while self.eat(&Tok::Comma) {
            coords.push(self.int()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(Index::new(coords))
    }

    fn index_set(&mut self) -> PResult<BTreeSet<Index>> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut set = BTreeSet::new();
        if self.eat(&Tok::RBrace) {
            return Ok(set);
        }
        set.insert(self.tuple()?);
        while self.eat(&Tok::Comma) {
            set.insert(self.tuple()?);
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(set)
    }

    fn position_set(&mut self) -> PResult<BTreeSet<usize>> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut set = BTreeSet::from([self.uint()?]);
        while self.eat(&Tok::Comma) {
            set.insert(self.uint()?);
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(set)
    }

    fn on_list(&mut self) -> PResult<Vec<(usize, usize)>> {
        if !self.is_keyword("on") {
            return Err(self.error_here(&["`on(...)`"]));
        }
        self.bump();
        self.expect(Tok::LParen, "`(`")?;
        let mut pairs = Vec::new();
        loop {
            let l = self.uint()?;
            self.expect(Tok::Colon, "`:`")?;
            let r = self.uint()?;
            pairs.push((l, r));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(pairs)
    }

    fn transform_spec(&mut self) -> PResult<TransformSpec> {
        self.expect(Tok::LBracket, "`[`")?;
        let mut steps = Vec::new();
        if !self.eat(&Tok::RBracket) {
            loop {
                steps.push(self.step()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RBracket, "`]`")?;
        }
        Ok(TransformSpec::new(steps))
    }

    fn step(&mut self) -> PResult<Step> {
        const STEPS: [&str; 7] = [
            "`permute`",
            "`translate`",
            "`insert`",
            "`remove`",
            "`compact`",
            "`remap`",
            "`restore`",
        ];
        let name = match self.peek() {
            Tok::Ident(n) => n.clone(),
            _ => return Err(self.error_here(&STEPS)),
        };
        if !STEPS.contains(&format!("`{name}`").as_str()) {
            return Err(self.error_here(&STEPS));
        }
        self.bump();
        self.expect(Tok::LParen, "`(`")?;
        let step = match name.as_str() {
            "permute" => {
                let mut perm = vec![self.uint()?];
                while self.eat(&Tok::Comma) {
                    perm.push(self.uint()?);
                }
                Step::Permute(perm)
            }
            "translate" => {
                let dim = self.uint()?;
                self.comma()?;
                Step::Translate {
                    dim,
                    offset: self.int()?,
                }
            }
            "insert" => {
                let position = self.uint()?;
                self.comma()?;
                Step::InsertDim {
                    position,
                    value: self.int()?,
                }
            }
            "remove" => Step::RemoveDim(self.uint()?),
            "compact" => Step::Compact(self.uint()?),
            "remap" => {
                let dim = self.uint()?;
                self.comma()?;
                let mut table = BTreeMap::new();
                self.map_entries(|p| {
                    let from = p.int()?;
                    p.expect(Tok::Colon, "`:`")?;
                    table.insert(from, p.int()?);
                    Ok(())
                })?;
                Step::Remap { dim, table }
            }
            _ => {
                let position = self.uint()?;
                self.comma()?;
                let mut table = BTreeMap::new();
                self.map_entries(|p| {
                    let i = p.tuple()?;
                    p.expect(Tok::Colon, "`:`")?;
                    table.insert(i, p.int()?);
                    Ok(())
                })?;
                Step::Restore { position, table }
            }
        };
        self.expect(Tok::RParen, "`)`")?;
        Ok(step)
    }

    /// `"{" [entry ("," entry)*] "}"`
    fn map_entries(&mut self, mut entry: impl FnMut(&mut Self) -> PResult<()>) -> PResult<()> {
        self.expect(Tok::LBrace, "`{`")?;
        if self.eat(&Tok::RBrace) {
            return Ok(());
        }
        loop {
            entry(self)?;
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrace, "`}`").map(drop)
    }

    fn pred(&mut self) -> PResult<Predicate> {
        let mut p = self.and_pred()?;
        while self.is_keyword("or") {
            self.bump();
            p = p.or(self.and_pred()?);
        }
        Ok(p)
    }

    fn and_pred(&mut self) -> PResult<Predicate> {
        let mut p = self.unary_pred()?;
        while self.is_keyword("and") {
            self.bump();
            p = p.and(self.unary_pred()?);
        }
        Ok(p)
    }

    fn unary_pred(&mut self) -> PResult<Predicate> {
        if self.is_keyword("not") {
            self.bump();
            return Ok(self.unary_pred()?.not());
        }
        if self.is_keyword("true") {
            self.bump();
            return Ok(Predicate::True);
        }
        if self.eat(&Tok::LParen) {
            let p = self.pred()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(p);
        }
        self.atom()
    }

    fn cmp(&mut self) -> PResult<crate::algebra::CmpOp> {
        match *self.peek() {
            Tok::Cmp(op) => {
                self.bump();
                Ok(op)
            }
            _ => Err(self.error_here(&["a comparison operator"])),
        }
    }

    fn atom(&mut self) -> PResult<Predicate> {
        match *self.peek() {
            Tok::Dim(left) => {
                self.bump();
                let op = self.cmp()?;
                match *self.peek() {
                    Tok::Dim(right) => {
                        self.bump();
                        Ok(Predicate::coords(op, left, right))
                    }
                    Tok::Int(c) => {
                        self.bump();
                        Ok(Predicate::coord(op, left, c))
                    }
                    _ => Err(self.error_here(&["an integer", "`dim<N>`"])),
                }
            }
            Tok::Ident(ref w) if w == "val" => {
                self.bump();
                let field = if self.eat(&Tok::Dot) {
                    Some(self.uint()?)
                } else {
                    None
                };
                let op = self.cmp()?;
                let constant = self.literal()?;
                Ok(match field {
                    Some(pos) => Predicate::Field { pos, op, constant },
                    None => Predicate::Value { op, constant },
                })
            }
            _ => Err(self.error_here(&["`val`", "`dim<N>`", "`not`", "`true`", "`(`"])),
        }
    }

    fn literal(&mut self) -> PResult<Value> {
        let t = self.tokens[self.pos].clone();
        match t.tok {
            Tok::Int(n) => {
                self.bump();
                Ok(Value::Int(n))
            }
            Tok::Float(x) => {
                self.bump();
                Value::float(x).map_err(|_| self.error_here(&["a finite float"]))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Value::Str(s))
            }
            Tok::Ident(ref w) if w == "undef" => {
                self.bump();
                Ok(Value::Undef)
            }
            Tok::LParen => {
                self.bump();
                let mut items = vec![self.literal()?];
                while self.eat(&Tok::Comma) {
                    if *self.peek() == Tok::RParen {
                        break;
                    }
                    items.push(self.literal()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(Value::Tuple(items))
            }
            Tok::Ident(ref w) if w == "array" && *self.peek2() == Tok::LBracket => {
                self.bump();
                self.bump();
                let arity = self.uint()?;
                self.expect(Tok::RBracket, "`]`")?;
                let mut pairs = Vec::new();
                self.map_entries(|p| {
                    let i = p.tuple()?;
                    p.expect(Tok::Colon, "`:`")?;
                    pairs.push((i, p.literal()?));
                    Ok(())
                })?;
                Array::new(arity, pairs).map(Value::array).map_err(|e| {
                    ParseError::new(self.src, t.start, format!("invalid array literal ({e})"), vec!["a valid array literal".into()])
                })
            }
            _ => Err(self.error_here(&["a literal value"])),
        }
    }
}
