//! Relational tables as two-dimensional arrays.
//!
//! A table becomes a matrix whose dimension 1 enumerates the columns and
//! whose dimension 0 enumerates the rows, either as `0..n` or, when a key
//! column is declared, as the key values themselves. Column names live in a
//! [`DimensionLabels`] map; matrix-typed cells are stored as nested arrays.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::algebra::{select, Predicate};
use crate::array::{Array, ArrayBuilder, Index};
use crate::error::{Error, Result};
use crate::value::Value;

/// A bijection between string labels and integer coordinates on one
/// dimension.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelMap {
    by_label: BTreeMap<String, i64>,
    by_coord: BTreeMap<i64, String>,
}

impl LabelMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Enumerates `labels` as `0, 1, 2, ...`.
    pub fn enumerate<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut map = LabelMap::new();
        for (coord, label) in (0..).zip(labels) {
            map.insert(label, coord)?;
        }
        Ok(map)
    }

    pub fn insert(&mut self, label: impl Into<String>, coord: i64) -> Result<()> {
        let label = label.into();
        if self.by_label.contains_key(&label) {
            return Err(Error::SchemaMismatch(format!("label {label:?} used twice")));
        }
        if let Some(other) = self.by_coord.get(&coord) {
            return Err(Error::SchemaMismatch(format!(
                "coordinate {coord} already labeled {other:?}"
            )));
        }
        self.by_coord.insert(coord, label.clone());
        self.by_label.insert(label, coord);
        Ok(())
    }

    pub fn coord(&self, label: &str) -> Option<i64> {
        self.by_label.get(label).copied()
    }

    pub fn label(&self, coord: i64) -> Option<&str> {
        self.by_coord.get(&coord).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.by_coord.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_coord.is_empty()
    }

    /// `(coordinate, label)` pairs in coordinate order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &str)> {
        self.by_coord.iter().map(|(c, l)| (*c, l.as_str()))
    }
}

/// Optional label maps, one slot per dimension.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DimensionLabels {
    per_dim: Vec<Option<LabelMap>>,
}

impl DimensionLabels {
    pub fn none(arity: usize) -> Self {
        DimensionLabels {
            per_dim: vec![None; arity],
        }
    }

    pub fn arity(&self) -> usize {
        self.per_dim.len()
    }

    pub fn set(&mut self, dim: usize, map: LabelMap) {
        if dim >= self.per_dim.len() {
            self.per_dim.resize(dim + 1, None);
        }
        self.per_dim[dim] = Some(map);
    }

    pub fn dim(&self, dim: usize) -> Option<&LabelMap> {
        self.per_dim.get(dim).and_then(Option::as_ref)
    }

    pub fn is_empty(&self) -> bool {
        self.per_dim.iter().all(|m| m.as_ref().map_or(true, LabelMap::is_empty))
    }

    pub fn coord_of(&self, dim: usize, label: &str) -> Result<i64> {
        self.dim(dim)
            .and_then(|m| m.coord(label))
            .ok_or_else(|| Error::UnknownLabel {
                dim,
                label: label.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnType {
    Int,
    Float,
    Str,
    /// A nested array cell.
    Matrix,
}

impl ColumnType {
    pub fn name(self) -> &'static str {
        match self {
            ColumnType::Int => "int",
            ColumnType::Float => "float",
            ColumnType::Str => "str",
            ColumnType::Matrix => "matrix",
        }
    }

    /// `Undef` is accepted in every column.
    pub fn admits(self, v: &Value) -> bool {
        matches!(
            (self, v),
            (_, Value::Undef)
                | (ColumnType::Int, Value::Int(_))
                | (ColumnType::Float, Value::Float(_))
                | (ColumnType::Str, Value::Str(_))
                | (ColumnType::Matrix, Value::Array(_))
        )
    }
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ColumnType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "int" => Ok(ColumnType::Int),
            "float" => Ok(ColumnType::Float),
            "str" => Ok(ColumnType::Str),
            "matrix" => Ok(ColumnType::Matrix),
            other => Err(Error::SchemaMismatch(format!("unknown column type {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub ty: ColumnType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableSchema {
    columns: Vec<Column>,
    key: Option<usize>,
}

impl TableSchema {
    pub fn new(columns: Vec<Column>, key: Option<&str>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for c in &columns {
            if !names.insert(c.name.as_str()) {
                return Err(Error::SchemaMismatch(format!("duplicate column {:?}", c.name)));
            }
        }
        let key = match key {
            None => None,
            Some(k) => Some(
                columns
                    .iter()
                    .position(|c| c.name == k)
                    .ok_or_else(|| Error::SchemaMismatch(format!("key column {k:?} does not exist")))?,
            ),
        };
        if let Some(k) = key {
            if columns[k].ty != ColumnType::Int {
                return Err(Error::SchemaMismatch(format!(
                    "key column {:?} must be int",
                    columns[k].name
                )));
            }
        }
        Ok(TableSchema { columns, key })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn key_column(&self) -> Option<&Column> {
        self.key.map(|k| &self.columns[k])
    }

    fn key_position(&self) -> Option<usize> {
        self.key
    }
}

/// Encodes `rows` as a 2-d array. Dimension 1 is labeled with the column
/// names.
pub fn encode_table(schema: &TableSchema, rows: &[Vec<Value>]) -> Result<(Array, DimensionLabels)> {
    let mut builder = ArrayBuilder::new(2)?;
    let mut keys = BTreeSet::new();
    for (r, row) in rows.iter().enumerate() {
        if row.len() != schema.columns.len() {
            return Err(Error::SchemaMismatch(format!(
                "row {r} has {} cells, schema has {} columns",
                row.len(),
                schema.columns.len()
            )));
        }
        for (cell, col) in row.iter().zip(&schema.columns) {
            if !col.ty.admits(cell) {
                return Err(Error::SchemaMismatch(format!(
                    "row {r}, column {:?}: expected {}, found {}",
                    col.name,
                    col.ty,
                    cell.tag()
                )));
            }
        }
        let row_coord = match schema.key_position() {
            None => r as i64,
            Some(k) => match row[k] {
                Value::Int(key) if key >= 0 => {
                    if !keys.insert(key) {
                        return Err(Error::DuplicateKey(key));
                    }
                    key
                }
                ref other => {
                    return Err(Error::SchemaMismatch(format!(
                        "row {r}: key must be a non-negative integer, found {other}"
                    )))
                }
            },
        };
        for (c, cell) in row.iter().enumerate() {
            builder.insert(Index::from([row_coord, c as i64]), cell.clone())?;
        }
    }
    let mut labels = DimensionLabels::none(2);
    labels.set(
        1,
        LabelMap::enumerate(schema.columns.iter().map(|c| c.name.clone()))?,
    );
    Ok((builder.finish(), labels))
}

/// Inverse of [`encode_table`]. Rows come back in ascending row-coordinate
/// order.
pub fn decode_table(a: &Array, labels: &DimensionLabels, schema: &TableSchema) -> Result<Vec<Vec<Value>>> {
    if a.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: a.arity(),
        });
    }
    let column_coords = schema
        .columns
        .iter()
        .map(|c| labels.coord_of(1, &c.name))
        .collect::<Result<Vec<_>>>()?;
    let known: BTreeSet<i64> = column_coords.iter().copied().collect();
    let mut by_row: BTreeMap<i64, BTreeMap<i64, &Value>> = BTreeMap::new();
    for (i, v) in a {
        let (row, col) = (i.coord(0), i.coord(1));
        if !known.contains(&col) {
            return Err(Error::SchemaMismatch(format!(
                "cell {i} is in no schema column"
            )));
        }
        by_row.entry(row).or_default().insert(col, v);
    }
    by_row
        .into_iter()
        .map(|(row, cells)| {
            schema
                .columns
                .iter()
                .zip(&column_coords)
                .map(|(col, coord)| {
                    cells
                        .get(coord)
                        .map(|v| (*v).clone())
                        .ok_or_else(|| Error::MissingCell {
                            row,
                            column: col.name.clone(),
                        })
                })
                .collect()
        })
        .collect()
}

/// Selection on a labeled coordinate.
pub fn label_select(a: &Array, labels: &DimensionLabels, dim: usize, label: &str) -> Result<Array> {
    let coord = labels.coord_of(dim, label)?;
    select(a, &Predicate::coord_eq(dim, coord))
}
