//! The textual array exchange format.
//!
//! ```text
//! arrac v1 arity=2 count=4
//! label dim=1 0="row" 1="col"
//! 0,0 -> str:"a"
//! 0,1 -> tuple(int:1,float:2.5)
//! 1,0 -> array{arity=1; 0 -> undef; 3 -> int:7}
//! ```
//!
//! UTF-8, LF line endings, body lines in lexicographic index order. Writing
//! is canonical: equal arrays always produce identical bytes, and floats use
//! the shortest representation that round-trips.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::array::{Array, ArrayBuilder, Index};
use crate::error::Error;
use crate::relbridge::{DimensionLabels, LabelMap};
use crate::value::Value;

pub const MAGIC: &str = "arrac v1";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: {source}")]
    Array {
        line: usize,
        #[source]
        source: Error,
    },

    #[error("header declares {declared} entries, body has {found}")]
    Count { declared: usize, found: usize },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl FormatError {
    /// The model-level error behind this one, if any.
    pub fn array_error(&self) -> Option<&Error> {
        match self {
            FormatError::Array { source, .. } => Some(source),
            _ => None,
        }
    }
}

pub type Result<T, E = FormatError> = std::result::Result<T, E>;

/// Canonical text of `a`, with optional labels.
pub fn write_array(a: &Array, labels: Option<&DimensionLabels>) -> String {
    let mut out = String::new();
    writeln!(out, "{MAGIC} arity={} count={}", a.arity(), a.len()).unwrap();
    if let Some(labels) = labels {
        for dim in 0..labels.arity() {
            let Some(map) = labels.dim(dim).filter(|m| !m.is_empty()) else {
                continue;
            };
            write!(out, "label dim={dim}").unwrap();
            for (coord, label) in map.iter() {
                write!(out, " {coord}=").unwrap();
                write_string(label, &mut out);
            }
            out.push('\n');
        }
    }
    for (i, v) in a {
        write_index(i, &mut out);
        out.push_str(" -> ");
        write_value(v, &mut out);
        out.push('\n');
    }
    out
}

fn write_index(i: &Index, out: &mut String) {
    for (k, c) in i.coords().iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        write!(out, "{c}").unwrap();
    }
}

pub(crate) fn write_string(s: &str, out: &mut String) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => write!(out, "\\u{{{:x}}}", c as u32).unwrap(),
            c => out.push(c),
        }
    }
    out.push('"');
}

pub fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Int(n) => write!(out, "int:{n}").unwrap(),
        Value::Float(x) => write!(out, "float:{:?}", x.get()).unwrap(),
        Value::Str(s) => {
            out.push_str("str:");
            write_string(s, out);
        }
        Value::Undef => out.push_str("undef"),
        Value::Tuple(items) => {
            out.push_str("tuple(");
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(')');
        }
        Value::Array(a) => {
            write!(out, "array{{arity={};", a.arity()).unwrap();
            for (k, (i, item)) in a.iter().enumerate() {
                out.push_str(if k == 0 { " " } else { "; " });
                write_index(i, out);
                out.push_str(" -> ");
                write_value(item, out);
            }
            out.push('}');
        }
    }
}

pub fn value_to_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, &mut out);
    out
}

/// Parses a complete file.
pub fn read_array(text: &str) -> Result<(Array, DimensionLabels)> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut lines = body.split('\n').enumerate().map(|(k, l)| (k + 1, l));
    let (_, header) = lines.next().filter(|(_, h)| !h.is_empty()).ok_or_else(|| syntax(1, "empty input"))?;
    let (arity, count) = parse_header(header)?;
    let mut labels = DimensionLabels::none(arity);
    let mut builder = ArrayBuilder::new(arity).map_err(|source| FormatError::Array { line: 1, source })?;
    let mut body_lines = 0;
    for (line, text) in lines {
        if text.is_empty() {
            return Err(syntax(line, "blank line"));
        }
        if let Some(rest) = text.strip_prefix("label ") {
            if body_lines > 0 {
                return Err(syntax(line, "label lines must precede the body"));
            }
            let (dim, map) = parse_label_line(rest, line)?;
            if dim >= arity {
                return Err(syntax(line, format!("label dimension {dim} exceeds arity {arity}")));
            }
            if labels.dim(dim).is_some() {
                return Err(syntax(line, format!("dimension {dim} labeled twice")));
            }
            labels.set(dim, map);
            continue;
        }
        let mut cur = Cursor::new(text, line);
        let (index, value) = cur.association()?;
        cur.end()?;
        builder
            .insert(index, value)
            .map_err(|source| FormatError::Array { line, source })?;
        body_lines += 1;
    }
    if body_lines != count {
        return Err(FormatError::Count {
            declared: count,
            found: body_lines,
        });
    }
    Ok((builder.finish(), labels))
}

pub fn parse_value(text: &str) -> Result<Value> {
    let mut cur = Cursor::new(text, 1);
    let v = cur.value()?;
    cur.end()?;
    Ok(v)
}

pub fn save_array(a: &Array, labels: Option<&DimensionLabels>, path: &Path) -> Result<()> {
    fs::write(path, write_array(a, labels)).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_array(path: &Path) -> Result<(Array, DimensionLabels)> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_array(&text)
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_header(header: &str) -> Result<(usize, usize)> {
    let rest = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| syntax(1, format!("expected header starting with {MAGIC:?}")))?;
    let mut arity = None;
    let mut count = None;
    for field in rest.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| syntax(1, format!("malformed header field {field:?}")))?;
        let n: usize = value
            .parse()
            .map_err(|_| syntax(1, format!("header field {key} is not a number")))?;
        match key {
            "arity" => arity = Some(n),
            "count" => count = Some(n),
            other => return Err(syntax(1, format!("unknown header field {other:?}"))),
        }
    }
    match (arity, count) {
        (Some(a), Some(c)) => Ok((a, c)),
        _ => Err(syntax(1, "header needs arity= and count=")),
    }
}

fn parse_label_line(rest: &str, line: usize) -> Result<(usize, LabelMap)> {
    let mut cur = Cursor::new(rest, line);
    cur.expect("dim=")?;
    let dim = cur.integer()?;
    let dim = usize::try_from(dim).map_err(|_| syntax(line, "negative label dimension"))?;
    let mut map = LabelMap::new();
    while !cur.at_end() {
        cur.expect(" ")?;
        let coord = cur.integer()?;
        cur.expect("=")?;
        let label = cur.string()?;
        map.insert(label, coord)
            .map_err(|source| FormatError::Array { line, source })?;
    }
    Ok((dim, map))
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Cursor { text, pos: 0, line }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.pos == self.text.len()
    }

    fn err(&self, message: impl Into<String>) -> FormatError {
        syntax(
            self.line,
            format!("column {}: {}", self.pos + 1, message.into()),
        )
    }

    fn end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err(format!("unexpected trailing text {:?}", self.rest())))
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(format!("expected {s:?}")))
        }
    }

    fn skip_spaces(&mut self) {
        while self.rest().starts_with(' ') {
            self.pos += 1;
        }
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        self.eat("-");
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            self.pos = start;
            return Err(self.err("expected an integer"));
        }
        self.pos += digits;
        self.text[start..self.pos]
            .parse()
            .map_err(|_| syntax(self.line, format!("integer {:?} out of range", &self.text[start..self.pos])))
    }

    fn index(&mut self) -> Result<Index> {
        let mut coords = vec![self.integer()?];
        while self.eat(",") {
            coords.push(self.integer()?);
        }
        Ok(Index::new(coords))
    }

    fn association(&mut self) -> Result<(Index, Value)> {
        let index = self.index()?;
        self.skip_spaces();
        self.expect("->")?;
        self.skip_spaces();
        let value = self.value()?;
        Ok((index, value))
    }

    fn string(&mut self) -> Result<String> {
        self.expect("\"")?;
        let mut out = String::new();
        let mut chars = self.rest().char_indices();
        loop {
            let Some((off, ch)) = chars.next() else {
                return Err(self.err("unterminated string"));
            };
            match ch {
                '"' => {
                    self.pos += off + 1;
                    return Ok(out);
                }
                '\\' => {
                    let Some((_, esc)) = chars.next() else {
                        return Err(self.err("unterminated escape"));
                    };
                    match esc {
                        '"' => out.push('"'),
                        '\\' => out.push('\\'),
                        'n' => out.push('\n'),
                        'r' => out.push('\r'),
                        't' => out.push('\t'),
                        'u' => {
                            let mut hex = String::new();
                            if chars.next().map(|c| c.1) != Some('{') {
                                return Err(self.err("expected '{' after \\u"));
                            }
                            loop {
                                match chars.next() {
                                    Some((_, '}')) => break,
                                    Some((_, h)) if h.is_ascii_hexdigit() => hex.push(h),
                                    _ => return Err(self.err("malformed \\u escape")),
                                }
                            }
                            let ch = u32::from_str_radix(&hex, 16)
                                .ok()
                                .and_then(char::from_u32)
                                .ok_or_else(|| self.err("invalid code point"))?;
                            out.push(ch);
                        }
                        other => return Err(self.err(format!("unknown escape \\{other}"))),
                    }
                }
                c => out.push(c),
            }
        }
    }

    fn value(&mut self) -> Result<Value> {
        if self.eat("int:") {
            Ok(Value::Int(self.integer()?))
        } else if self.eat("float:") {
            let len = self
                .rest()
                .find(|c: char| matches!(c, ',' | ')' | ';' | '}' | ' '))
                .unwrap_or(self.rest().len());
            let text = &self.rest()[..len];
            let x: f64 = text
                .parse()
                .map_err(|_| self.err(format!("malformed float {text:?}")))?;
            let v = Value::float(x).map_err(|source| FormatError::Array {
                line: self.line,
                source,
            })?;
            self.pos += len;
            Ok(v)
        } else if self.eat("str:") {
            Ok(Value::Str(self.string()?))
        } else if self.eat("undef") {
            Ok(Value::Undef)
        } else if self.eat("tuple(") {
            let mut items = vec![self.value()?];
            while self.eat(",") {
                items.push(self.value()?);
            }
            self.expect(")")?;
            Ok(Value::Tuple(items))
        } else if self.eat("array{arity=") {
            let arity = self.integer()?;
            let arity = usize::try_from(arity).map_err(|_| self.err("negative arity"))?;
            self.expect(";")?;
            let mut builder = ArrayBuilder::new(arity).map_err(|source| FormatError::Array {
                line: self.line,
                source,
            })?;
            self.skip_spaces();
            if !self.eat("}") {
                loop {
                    self.skip_spaces();
                    let (index, value) = self.association()?;
                    builder.insert(index, value).map_err(|source| FormatError::Array {
                        line: self.line,
                        source,
                    })?;
                    if self.eat("}") {
                        break;
                    }
                    self.expect(";")?;
                }
            }
            Ok(Value::array(builder.finish()))
        } else {
            Err(self.err("expected a value"))
        }
    }
}
