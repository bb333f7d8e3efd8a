//! On-disk placements: a manifest plus one array file per fragment.
//!
//! ```text
//! arrac-placement v1
//! source M
//! arity 2
//! scheme vpartition(M, dim0 = 0, dim0 != 0)
//! fragment 0 shard=0 file=M.frag0.arr expr=select(M, dim0 = 0)
//! fragment 1 shard=1 file=M.frag1.arr expr=select(M, dim0 != 0)
//! ```
//!
//! Fragment paths are relative to the manifest's directory.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::algebra::select;
use crate::distribution::{Fragment, PartitionScheme, Placement};
use crate::error::Error;
use crate::format::{load_array, save_array, FormatError};
use crate::qlang::{parse, Expr, ParseError, PredText};

pub const MANIFEST_MAGIC: &str = "arrac-placement v1";

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("{}: line {line}: {message}", path.display())]
    Syntax {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: line {line}: {source}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: ParseError,
    },

    #[error("{}: {source}", path.display())]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },

    #[error("{}: {source}", path.display())]
    Placement {
        path: PathBuf,
        #[source]
        source: Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub fn manifest_path(dir: &Path, source: &str) -> PathBuf {
    dir.join(format!("{source}.placement"))
}

fn fragment_file(source: &str, id: usize) -> String {
    format!("{source}.frag{id}.arr")
}

/// The partition expression that produced `scheme` from `source`.
pub fn scheme_expr(source: &str, scheme: &PartitionScheme) -> Expr {
    let src = Box::new(Expr::reference(source));
    match scheme {
        PartitionScheme::Vertical { predicates } => Expr::VPartition(src, predicates.clone()),
        PartitionScheme::Horizontal { slices, .. } => Expr::HPartition(src, slices.clone()),
    }
}

/// An expression, over the source array, whose value is fragment `id`.
pub fn fragment_expr(source: &str, scheme: &PartitionScheme, id: usize) -> String {
    match scheme {
        PartitionScheme::Vertical { predicates } => {
            format!("select({source}, {})", PredText(&predicates[id]))
        }
        PartitionScheme::Horizontal { .. } => {
            format!("fragment({}, {id})", scheme_expr(source, scheme))
        }
    }
}

pub fn render_manifest(source: &str, p: &Placement) -> String {
    let mut out = String::new();
    let scheme = p.scheme();
    writeln!(out, "{MANIFEST_MAGIC}").unwrap();
    writeln!(out, "source {source}").unwrap();
    writeln!(out, "arity {}", p.origin_arity()).unwrap();
    writeln!(out, "scheme {}", scheme_expr(source, scheme)).unwrap();
    for f in p.fragments() {
        writeln!(
            out,
            "fragment {} shard={} file={} expr={}",
            f.id,
            f.shard,
            fragment_file(source, f.id),
            fragment_expr(source, scheme, f.id)
        )
        .unwrap();
    }
    out
}

/// Writes the manifest and every fragment file into `dir`; returns the
/// manifest path.
pub fn write_placement(dir: &Path, source: &str, p: &Placement) -> Result<PathBuf, ManifestError> {
    for f in p.fragments() {
        let path = dir.join(fragment_file(source, f.id));
        save_array(&f.array, None, &path).map_err(|source| ManifestError::Format { path, source })?;
    }
    let path = manifest_path(dir, source);
    fs::write(&path, render_manifest(source, p)).map_err(|source| ManifestError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

struct FragmentLine {
    id: usize,
    shard: usize,
    file: String,
    expr: String,
    line: usize,
}

/// Loads a placement from its manifest. Fragment contents are not checked
/// against the scheme here; see [`verify_fragments`].
pub fn read_placement(manifest: &Path) -> Result<Placement, ManifestError> {
    let syntax = |line: usize, message: String| ManifestError::Syntax {
        path: manifest.to_path_buf(),
        line,
        message,
    };
    let text = fs::read_to_string(manifest).map_err(|source| ManifestError::Io {
        path: manifest.to_path_buf(),
        source,
    })?;
    let dir = manifest.parent().unwrap_or(Path::new("."));

    let mut lines = text.lines().enumerate().map(|(n, l)| (n + 1, l));
    match lines.next() {
        Some((_, MANIFEST_MAGIC)) => {}
        _ => return Err(syntax(1, format!("expected `{MANIFEST_MAGIC}`"))),
    }
    let mut field = |name: &str| -> Result<(usize, String), ManifestError> {
        match lines.next() {
            Some((n, l)) => match l.strip_prefix(name).and_then(|r| r.strip_prefix(' ')) {
                Some(rest) => Ok((n, rest.to_string())),
                None => Err(syntax(n, format!("expected `{name} ...`"))),
            },
            None => Err(syntax(0, format!("missing `{name}` line"))),
        }
    };
    let (_, source) = field("source")?;
    let (arity_line, arity) = field("arity")?;
    let arity: usize = arity
        .parse()
        .map_err(|_| syntax(arity_line, format!("bad arity `{arity}`")))?;
    let (scheme_line, scheme_text) = field("scheme")?;
    let scheme_ast = parse(&scheme_text).map_err(|source| ManifestError::Parse {
        path: manifest.to_path_buf(),
        line: scheme_line,
        source,
    })?;
    let scheme = match scheme_ast {
        Expr::VPartition(src, predicates) if *src == Expr::reference(&source) => {
            PartitionScheme::Vertical { predicates }
        }
        Expr::HPartition(src, slices) if *src == Expr::reference(&source) => {
            let width = slices
                .iter()
                .flat_map(BTreeSet::iter)
                .max()
                .map_or(0, |m| m + 1);
            PartitionScheme::Horizontal { slices, width }
        }
        _ => {
            return Err(syntax(
                scheme_line,
                format!("expected vpartition({source}, ...) or hpartition({source}, ...)"),
            ))
        }
    };

    let mut entries = Vec::new();
    for (n, l) in lines {
        if l.is_empty() {
            continue;
        }
        entries.push(parse_fragment_line(n, l).map_err(|m| syntax(n, m))?);
    }

    let mut fragments = Vec::new();
    for e in &entries {
        if e.id >= scheme.fragment_count() {
            return Err(syntax(e.line, format!("fragment id {} out of range", e.id)));
        }
        let expected = fragment_expr(&source, &scheme, e.id);
        if e.expr != expected {
            return Err(syntax(
                e.line,
                format!("fragment expression `{}` does not match scheme, expected `{expected}`", e.expr),
            ));
        }
        let path = dir.join(&e.file);
        let (array, _) = load_array(&path).map_err(|source| ManifestError::Format {
            path: path.clone(),
            source,
        })?;
        fragments.push(Fragment {
            id: e.id,
            shard: e.shard,
            array,
        });
    }
    Placement::from_parts(scheme, arity, fragments).map_err(|source| ManifestError::Placement {
        path: manifest.to_path_buf(),
        source,
    })
}

fn parse_fragment_line(line: usize, l: &str) -> Result<FragmentLine, String> {
    let rest = l
        .strip_prefix("fragment ")
        .ok_or_else(|| "expected `fragment ...`".to_string())?;
    let mut parts = rest.splitn(4, ' ');
    let id = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or("bad fragment id")?;
    let shard = parts
        .next()
        .and_then(|s| s.strip_prefix("shard="))
        .and_then(|s| s.parse().ok())
        .ok_or("expected shard=<n>")?;
    let file = parts
        .next()
        .and_then(|s| s.strip_prefix("file="))
        .filter(|s| !s.is_empty() && !s.contains('/'))
        .ok_or("expected file=<name>")?
        .to_string();
    let expr = parts
        .next()
        .and_then(|s| s.strip_prefix("expr="))
        .ok_or("expected expr=<query>")?
        .to_string();
    Ok(FragmentLine {
        id,
        shard,
        file,
        expr,
        line,
    })
}

/// Checks that every entry of a vertical fragment satisfies that
/// fragment's predicate. Horizontal fragments carry no such constraint;
/// their supports are compared during reassembly.
pub fn verify_fragments(p: &Placement) -> Result<(), Error> {
    let PartitionScheme::Vertical { predicates } = p.scheme() else {
        return Ok(());
    };
    for (f, pred) in p.fragments().iter().zip(predicates) {
        let kept = select(&f.array, pred)?;
        if let Some(i) = f.array.indices().find(|i| !kept.contains(i)) {
            return Err(Error::BadPlacement(format!(
                "fragment {}: entry at {i} does not satisfy {}",
                f.id,
                PredText(pred)
            )));
        }
    }
    Ok(())
}
