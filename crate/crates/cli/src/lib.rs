//! The `arrac` command-line front end.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |---|---|
//! | 0 | success |
//! | 1 | I/O error |
//! | 2 | usage error |
//! | 3 | query parse error |
//! | 4 | query type error |
//! | 5 | run-time operator error |
//! | 6 | malformed array, manifest or table file |
//! | 7 | invalid partition scheme or placement |

pub mod args;
pub mod table;

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use arrac_core::distribution::{partition_horizontal, partition_vertical, reassemble, Placement};
use arrac_core::format::{load_array, save_array, write_array, FormatError};
use arrac_core::manifest::{read_placement, verify_fragments, write_placement, ManifestError};
use arrac_core::qlang::{caret, evaluate, is_valid_name, parse_predicate, parse_with_spans, Catalog, EvalError};
use arrac_core::relbridge::encode_table;
use arrac_core::{Array, Error};

use args::{Cli, Command, OutputArgs, PlacementArgs};
use table::{read_table, write_table, TableError};

pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const TYPE: i32 = 4;
    pub const RUNTIME: i32 = 5;
    pub const FORMAT: i32 = 6;
    pub const SCHEME: i32 = 7;
}

/// A failed command: the exit code and the diagnostic for stderr.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        let code = match e {
            FormatError::Io { .. } => exit::IO,
            _ => exit::FORMAT,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<ManifestError> for CliError {
    fn from(e: ManifestError) -> Self {
        let code = match e {
            ManifestError::Io { .. } => exit::IO,
            ManifestError::Format {
                source: FormatError::Io { .. },
                ..
            } => exit::IO,
            ManifestError::Placement { .. } => exit::SCHEME,
            _ => exit::FORMAT,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<TableError> for CliError {
    fn from(e: TableError) -> Self {
        let code = match e {
            TableError::Model(_) => exit::SCHEME,
            _ => exit::FORMAT,
        };
        CliError::new(code, e.to_string())
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::new(exit::IO, format!("{}: {e}", path.display()))
}

pub fn array_path(catalog: &Path, name: &str) -> PathBuf {
    catalog.join(format!("{name}.arr"))
}

fn schema_path(catalog: &Path, name: &str) -> PathBuf {
    catalog.join(format!("{name}.schema"))
}

fn check_name(name: &str) -> Result<(), CliError> {
    if is_valid_name(name) {
        Ok(())
    } else {
        Err(CliError::new(
            exit::USAGE,
            format!("{name:?} is not a valid array name"),
        ))
    }
}

fn stem_name(path: &Path, name: Option<String>) -> Result<String, CliError> {
    let name = match name {
        Some(n) => n,
        None => path
            .file_stem()
            .and_then(|s| s.to_str())
            .map(str::to_string)
            .ok_or_else(|| CliError::new(exit::USAGE, "cannot derive a name; pass --name"))?,
    };
    check_name(&name)?;
    Ok(name)
}

fn load_named(catalog: &Path, name: &str) -> Result<Array, CliError> {
    let path = array_path(catalog, name);
    if !path.exists() {
        return Err(CliError::new(
            exit::IO,
            format!("no array named {name} in {}", catalog.display()),
        ));
    }
    Ok(load_array(&path)?.0)
}

fn emit(text: &str, output: &OutputArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &output.output {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::new(exit::IO, format!("stdout: {e}"))),
    }
}

fn say(stdout: &mut dyn Write, line: String) -> Result<(), CliError> {
    writeln!(stdout, "{line}").map_err(|e| CliError::new(exit::IO, format!("stdout: {e}")))
}

/// Parses, typechecks and evaluates `src`, loading only the catalog arrays
/// it references. Diagnostics point into `src`.
pub fn run_query(catalog_dir: &Path, src: &str) -> Result<Array, CliError> {
    let (expr, spans) =
        parse_with_spans(src).map_err(|e| CliError::new(exit::PARSE, e.render(src)))?;
    let mut catalog = Catalog::new();
    for name in expr.references() {
        let path = array_path(catalog_dir, name);
        // Missing names are left unbound and reported by the typechecker.
        if path.exists() {
            let (a, _) = load_array(&path)?;
            catalog
                .insert(name, a)
                .map_err(|e| CliError::new(exit::USAGE, e.to_string()))?;
        }
    }
    evaluate(&expr, &catalog).map_err(|e| {
        let code = match e {
            EvalError::Type(_) => exit::TYPE,
            EvalError::Operator { .. } => exit::RUNTIME,
        };
        let offset = spans.get(e.node()).map_or(0, |s| s.start);
        CliError::new(code, caret(src, offset, &e.to_string()))
    })
}

fn partition_error(e: Error) -> CliError {
    CliError::new(exit::SCHEME, e.to_string())
}

fn store_placement(
    catalog: &Path,
    name: &str,
    p: Placement,
    args: &PlacementArgs,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let p = match args.shards {
        Some(0) => return Err(CliError::new(exit::USAGE, "--shards must be positive")),
        Some(n) => p.assign_shards(n),
        None => p,
    };
    let dir = args.out_dir.as_deref().unwrap_or(catalog);
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let manifest = write_placement(dir, name, &p)?;
    say(stdout, manifest.display().to_string())
}

fn parse_slice(text: &str) -> Result<BTreeSet<usize>, CliError> {
    text.split(',')
        .map(|p| {
            p.trim().parse::<usize>().map_err(|_| {
                CliError::new(exit::USAGE, format!("bad slice {text:?}: expected positions like 0,2"))
            })
        })
        .collect()
}

/// Runs one command, writing results to `stdout`. Diagnostics are returned
/// in the error, never written to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Query {
            catalog,
            expr,
            file,
            output,
        } => {
            let src = match (expr, file) {
                (Some(e), _) => e,
                (None, Some(path)) => fs::read_to_string(&path).map_err(|e| io_error(&path, e))?,
                (None, None) => return Err(CliError::new(exit::USAGE, "no query given")),
            };
            let result = run_query(&catalog.catalog, src.trim_end())?;
            emit(&write_array(&result, None), &output, stdout)
        }
        Command::Load {
            catalog,
            path,
            name,
        } => {
            let name = stem_name(&path, name)?;
            let (a, labels) = load_array(&path)?;
            let dest = array_path(&catalog.catalog, &name);
            save_array(&a, Some(&labels), &dest)?;
            say(stdout, dest.display().to_string())
        }
        Command::Save {
            catalog,
            name,
            output,
        } => {
            check_name(&name)?;
            let path = array_path(&catalog.catalog, &name);
            if !path.exists() {
                return Err(CliError::new(exit::IO, format!("{}: no such array", path.display())));
            }
            let (a, labels) = load_array(&path)?;
            emit(&write_array(&a, Some(&labels)), &output, stdout)
        }
        Command::Vpartition {
            catalog,
            name,
            preds,
            placement,
        } => {
            check_name(&name)?;
            let a = load_named(&catalog.catalog, &name)?;
            let preds = preds
                .iter()
                .map(|src| parse_predicate(src).map_err(|e| CliError::new(exit::PARSE, e.render(src))))
                .collect::<Result<Vec<_>, _>>()?;
            let p = partition_vertical(&a, &preds).map_err(partition_error)?;
            store_placement(&catalog.catalog, &name, p, &placement, stdout)
        }
        Command::Hpartition {
            catalog,
            name,
            slices,
            placement,
        } => {
            check_name(&name)?;
            let a = load_named(&catalog.catalog, &name)?;
            let slices = slices.iter().map(|s| parse_slice(s)).collect::<Result<Vec<_>, _>>()?;
            let p = partition_horizontal(&a, &slices).map_err(partition_error)?;
            store_placement(&catalog.catalog, &name, p, &placement, stdout)
        }
        Command::Reassemble { manifest, output } => {
            let p = read_placement(&manifest)?;
            let a = reassemble(&p).map_err(|e| {
                let code = match e {
                    Error::ConsistencyViolation { .. } => exit::RUNTIME,
                    _ => exit::SCHEME,
                };
                CliError::new(code, format!("{}: {e}", manifest.display()))
            })?;
            verify_fragments(&p)
                .map_err(|e| CliError::new(exit::SCHEME, format!("{}: {e}", manifest.display())))?;
            emit(&write_array(&a, None), &output, stdout)
        }
        Command::EncodeTable {
            catalog,
            table,
            name,
            delimiter,
        } => {
            let name = stem_name(&table, name)?;
            let file = fs::File::open(&table).map_err(|e| io_error(&table, e))?;
            let (schema, rows) = read_table(file, delimiter)?;
            let (a, labels) = encode_table(&schema, &rows).map_err(TableError::from)?;
            let dest = array_path(&catalog.catalog, &name);
            save_array(&a, Some(&labels), &dest)?;
            let sidecar = schema_path(&catalog.catalog, &name);
            let mut header = Vec::new();
            write_table(&mut header, delimiter, &schema, &[])?;
            fs::write(&sidecar, header).map_err(|e| io_error(&sidecar, e))?;
            say(stdout, dest.display().to_string())
        }
        Command::DecodeTable {
            catalog,
            name,
            output,
            delimiter,
        } => {
            check_name(&name)?;
            let (a, labels) = load_array(&array_path(&catalog.catalog, &name))?;
            let sidecar = schema_path(&catalog.catalog, &name);
            let header = fs::read(&sidecar).map_err(|e| io_error(&sidecar, e))?;
            let (schema, _) = read_table(header.as_slice(), delimiter)?;
            let rows = arrac_core::relbridge::decode_table(&a, &labels, &schema)
                .map_err(TableError::from)?;
            let mut out = Vec::new();
            write_table(&mut out, delimiter, &schema, &rows)?;
            match output {
                Some(path) => fs::write(&path, out).map_err(|e| io_error(&path, e)),
                None => stdout
                    .write_all(&out)
                    .map_err(|e| CliError::new(exit::IO, format!("stdout: {e}"))),
            }
        }
    }
}
