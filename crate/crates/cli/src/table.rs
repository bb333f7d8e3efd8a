//! Delimited text tables.
//!
//! The header row names the columns, optionally typed as `name:type` with
//! type one of `int`, `float`, `str` (the default) or `matrix`. A leading
//! `*` marks the key column. Matrix cells use the exchange value syntax
//! (`array{arity=2; 0,0 -> float:1.5}`). An empty cell is `undef`.

use std::io::{Read, Write};

use arrac_core::format::{parse_value, value_to_string};
use arrac_core::relbridge::{Column, ColumnType, TableSchema};
use arrac_core::{Error, Value};

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("header column {column}: {message}")]
    Header { column: usize, message: String },

    #[error("record {record}, column {column:?}: {message}")]
    Cell {
        record: usize,
        column: String,
        message: String,
    },

    #[error(transparent)]
    Model(#[from] Error),
}

pub fn parse_header(fields: &[&str]) -> Result<TableSchema, TableError> {
    let mut columns = Vec::new();
    let mut key = None;
    for (k, raw) in fields.iter().enumerate() {
        let (is_key, spec) = match raw.strip_prefix('*') {
            Some(rest) => (true, rest),
            None => (false, *raw),
        };
        let (name, ty) = match spec.split_once(':') {
            Some((n, t)) => (n, t.parse::<ColumnType>().map_err(|e| TableError::Header {
                column: k,
                message: e.to_string(),
            })?),
            None => (spec, ColumnType::Str),
        };
        if name.is_empty() {
            return Err(TableError::Header {
                column: k,
                message: "empty column name".into(),
            });
        }
        if is_key {
            if key.is_some() {
                return Err(TableError::Header {
                    column: k,
                    message: "more than one key column".into(),
                });
            }
            key = Some(name.to_string());
        }
        columns.push(Column {
            name: name.to_string(),
            ty,
        });
    }
    Ok(TableSchema::new(columns, key.as_deref())?)
}

pub fn render_header(schema: &TableSchema) -> Vec<String> {
    let key = schema.key_column().map(|c| c.name.as_str());
    schema
        .columns()
        .iter()
        .map(|c| {
            let star = if Some(c.name.as_str()) == key { "*" } else { "" };
            format!("{star}{}:{}", c.name, c.ty)
        })
        .collect()
}

fn parse_cell(text: &str, ty: ColumnType) -> Result<Value, String> {
    if text.is_empty() {
        return Ok(Value::Undef);
    }
    match ty {
        ColumnType::Int => text.parse().map(Value::Int).map_err(|e| e.to_string()),
        ColumnType::Float => {
            let x: f64 = text.parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
            Value::float(x).map_err(|e| e.to_string())
        }
        ColumnType::Str => Ok(Value::str(text)),
        ColumnType::Matrix => match parse_value(text).map_err(|e| e.to_string())? {
            v @ Value::Array(_) => Ok(v),
            other => Err(format!("expected an array value, found {}", other.tag())),
        },
    }
}

fn render_cell(v: &Value) -> String {
    match v {
        Value::Undef => String::new(),
        Value::Int(n) => n.to_string(),
        Value::Float(x) => format!("{:?}", x.get()),
        Value::Str(s) => s.clone(),
        other => value_to_string(other),
    }
}

fn delimiter(d: char) -> Result<u8, TableError> {
    u8::try_from(d).ok().filter(u8::is_ascii).ok_or(TableError::Header {
        column: 0,
        message: format!("delimiter {d:?} is not a single ASCII character"),
    })
}

pub fn read_table(input: impl Read, delim: char) -> Result<(TableSchema, Vec<Vec<Value>>), TableError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter(delim)?)
        .has_headers(true)
        .from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let schema = parse_header(&header.iter().map(String::as_str).collect::<Vec<_>>())?;
    let mut rows = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .zip(schema.columns())
            .map(|(text, col)| {
                parse_cell(text, col.ty).map_err(|message| TableError::Cell {
                    record: r + 1,
                    column: col.name.clone(),
                    message,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok((schema, rows))
}

pub fn write_table(out: impl Write, delim: char, schema: &TableSchema, rows: &[Vec<Value>]) -> Result<(), TableError> {
    let mut writer = csv::WriterBuilder::new()
        .delimiter(delimiter(delim)?)
        .from_writer(out);
    writer.write_record(render_header(schema))?;
    for row in rows {
        writer.write_record(row.iter().map(render_cell))?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}
