//! `polywedge` command-line interface.
//!
//! Every command prints a report on standard output (JSON or text). Commands
//! that build a polytope write it to `--output` as a `.poly` file, or embed it
//! in the report when no output path is given.
//!
//! Exit codes: 0 success, 1 verification or validation failure, 2 usage,
//! input or parse errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "polywedge", version, about = "Exact polytope wedges, perturbations and path checks")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Where to write the resulting polytope (`.poly`).
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Complete the missing representation and validate.
    Enumerate(Input),
    /// Graph, diameter, simplicity and spindles.
    Analyze(Input),
    /// Wedge over a facet.
    Wedge {
        #[command(flatten)]
        input: Input,
        /// Foot facet, by label or index.
        #[arg(long)]
        foot: String,
    },
    /// Perturb a vertical facet's last normal coordinate to epsilon.
    Perturb {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        facet: String,
        /// A rational such as `1/8`, or `auto`.
        #[arg(long, default_value = "auto")]
        eps: String,
    },
    /// Wedge over `--foot`, then perturb the image of `--facet`.
    Pwedge {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        foot: String,
        #[arg(long)]
        facet: String,
        #[arg(long, default_value = "auto")]
        eps: String,
    },
    /// Check one of the path and edge claims on an input polytope.
    #[command(subcommand)]
    Verify(Verify),
    /// Emit a built-in polytope (`--list` to see the names).
    Fixture {
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
}

#[derive(Debug, Subcommand)]
enum Verify {
    /// Exhaustive nonrevisiting search on a spindle, with counting certificates.
    Lemma1 {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Survival of the nonsimple edge `[y, w]` under the perturbed wedge.
    Lemma2 {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        foot: String,
        #[arg(long)]
        facet: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        w: String,
        #[arg(long, default_value = "auto")]
        eps: String,
    },
    /// Predicted against re-enumerated vertex fates.
    Fates {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        foot: String,
        #[arg(long)]
        facet: String,
        #[arg(long, default_value = "auto")]
        eps: String,
    },
    /// Distance between the images of a path's endpoints after the perturbed wedge.
    PathImage {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        foot: String,
        #[arg(long)]
        facet: String,
        /// Comma-separated vertices, by label or index.
        #[arg(long, value_delimiter = ',', required = true)]
        path: Vec<String>,
        #[arg(long, default_value = "auto")]
        eps: String,
    },
}

#[derive(Debug, Args)]
struct Input {
    /// `.poly` file, or `-` for standard input.
    file: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Enumerate(input) => commands::enumerate(&input.file),
        Command::Analyze(input) => commands::analyze(&input.file),
        Command::Wedge { input, foot } => commands::wedge(&input.file, &foot),
        Command::Perturb { input, facet, eps } => commands::perturb(&input.file, &facet, &eps),
        Command::Pwedge {
            input,
            foot,
            facet,
            eps,
        } => commands::pwedge(&input.file, &foot, &facet, &eps),
        Command::Verify(Verify::Lemma1 { input, x, y }) => commands::lemma1(&input.file, &x, &y),
        Command::Verify(Verify::Lemma2 {
            input,
            foot,
            facet,
            y,
            w,
            eps,
        }) => commands::lemma2(&input.file, &foot, &facet, &y, &w, &eps),
        Command::Verify(Verify::Fates {
            input,
            foot,
            facet,
            eps,
        }) => commands::fates(&input.file, &foot, &facet, &eps),
        Command::Verify(Verify::PathImage {
            input,
            foot,
            facet,
            path,
            eps,
        }) => commands::path_image(&input.file, &foot, &facet, &path, &eps),
        Command::Fixture { name, list } => commands::fixture(name.as_deref(), list, cli.output.is_some()),
    };
    match outcome.and_then(|out| out.emit(cli.format, cli.output.as_deref())) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
