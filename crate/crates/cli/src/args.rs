use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "arrac", version, about = "Array algebra engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// The exchange format, with body lines in index order.
    #[default]
    Canonical,
}

#[derive(Debug, Args)]
pub struct CatalogArg {
    /// Catalog directory holding `<name>.arr` files.
    #[arg(short = 'c', long = "catalog", default_value = ".")]
    pub catalog: PathBuf,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the result here instead of stdout.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,

    #[arg(long = "format", value_enum, default_value_t = OutputFormat::Canonical)]
    pub format: OutputFormat,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a query against the catalog.
    Query {
        #[command(flatten)]
        catalog: CatalogArg,
        /// Query text.
        #[arg(required_unless_present = "file", conflicts_with = "file")]
        expr: Option<String>,
        /// Read the query from a file.
        #[arg(short = 'f', long = "file")]
        file: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },

    /// Validate an array file and add it to the catalog.
    Load {
        #[command(flatten)]
        catalog: CatalogArg,
        path: PathBuf,
        /// Catalog name; defaults to the file stem.
        #[arg(long)]
        name: Option<String>,
    },

    /// Write a catalog array out in canonical form.
    Save {
        #[command(flatten)]
        catalog: CatalogArg,
        name: String,
        #[command(flatten)]
        output: OutputArgs,
    },

    /// Split an array's support by disjoint, exhaustive predicates.
    Vpartition {
        #[command(flatten)]
        catalog: CatalogArg,
        name: String,
        /// One predicate per fragment, in query syntax.
        #[arg(long = "pred", required = true)]
        preds: Vec<String>,
        #[command(flatten)]
        placement: PlacementArgs,
    },

    /// Split an array's tuple values into slices of positions.
    Hpartition {
        #[command(flatten)]
        catalog: CatalogArg,
        name: String,
        /// Comma-separated tuple positions, one flag per fragment.
        #[arg(long = "slice", required = true)]
        slices: Vec<String>,
        #[command(flatten)]
        placement: PlacementArgs,
    },

    /// Rebuild an array from a placement manifest.
    Reassemble {
        manifest: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },

    /// Convert a delimited table into a 2-d array.
    EncodeTable {
        #[command(flatten)]
        catalog: CatalogArg,
        /// Table file. The header names each column as `name[:type]`; a
        /// leading `*` marks the key column.
        table: PathBuf,
        /// Catalog name; defaults to the file stem.
        #[arg(long)]
        name: Option<String>,
        #[arg(long, default_value_t = ',')]
        delimiter: char,
    },

    /// Convert a table-encoded array back to delimited text.
    DecodeTable {
        #[command(flatten)]
        catalog: CatalogArg,
        name: String,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = ',')]
        delimiter: char,
    },
}

#[derive(Debug, Args)]
pub struct PlacementArgs {
    /// Number of simulated shards; fragments are assigned round-robin.
    #[arg(long)]
    pub shards: Option<usize>,
    /// Directory for the manifest and fragment files; defaults to the
    /// catalog.
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
}
