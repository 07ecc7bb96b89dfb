//! `tilesemi`: substitution tiling semigroups from the command line.

mod commands;
mod manifest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

const EXIT_CODES: &str = "\
Exit codes:
   0  success
   2  bad command line
   3  the system cannot be loaded (unknown name, unreadable or malformed config)
   4  malformed element, word or golden file
   5  validation failed
   6  derived rule table differs from the golden file
   7  semi-nucleus not closed, or a contraction inequality fails
   8  AP complex has conflicting gluings, or its substitution map is ill-defined
   9  cannot write an output file
  10  a search cap was reached";

#[derive(Parser, Debug)]
#[command(name = "tilesemi", version, about = "Substitution tiling semigroups: rules, nuclei and limit spaces", after_help = EXIT_CODES)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the main output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write a run manifest (input hash, arguments, outputs) to this file.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum What {
    Patch,
    Supertile,
    Ap,
}

/// SYSTEM is a built-in name (fibonacci, fibonacci-uncollared, abb, halfhex,
/// penrose) or a path to a JSON config.
#[derive(Subcommand, Debug)]
pub enum Command {
    /// Stone inflation, primitivity, legal pairs, border forcing, recognisability.
    Validate { system: String },
    /// The substitution graph.
    Graph {
        system: String,
        #[arg(long, conflicts_with = "json")]
        dot: bool,
        #[arg(long)]
        json: bool,
    },
    /// SVG of a supertile, a patch or the AP complex 1-skeleton.
    Render {
        system: String,
        #[arg(long, value_enum, default_value = "supertile")]
        what: What,
        #[arg(long, default_value_t = 1)]
        level: usize,
        /// Right word whose forced patch to draw (with --what patch).
        #[arg(long)]
        word: Option<String>,
        /// Element whose patch to draw (with --what patch).
        #[arg(long)]
        element: Option<String>,
        /// Fractional digits of coordinates (default from TILESEMI_DIGITS, else 40).
        #[arg(long)]
        digits: Option<usize>,
    },
    /// Apply an element to a finite right word.
    Act { system: String, element: String, word: String },
    /// Derive the rule table of all generators.
    Rules {
        system: String,
        /// Golden file to compare against.
        #[arg(long)]
        compare: Option<PathBuf>,
        /// Overwrite this golden file with the derived table.
        #[arg(long)]
        regenerate: Option<PathBuf>,
    },
    /// The star-patch semi-nucleus and its closure check.
    Nucleus { system: String },
    /// Contraction index of one element, or of every generator.
    Contraction { system: String, element: Option<String> },
    /// The Anderson–Putnam complex.
    ApComplex {
        system: String,
        /// Emit the 1-skeleton in DOT instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// The cellular map induced by substitution on the AP complex.
    ApMap { system: String },
    /// Address point of a left word such as `...[(d,b)(b,d)]`.
    Alpha {
        system: String,
        word: String,
        /// Depth of the enclosure for finite words.
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Whether two eventually periodic left words address the same point.
    Aeq { system: String, first: String, second: String },
    /// τ(right) with the origin over α(left); pass `-` for no left word.
    Beta { system: String, left: String, right: String },
}

impl Command {
    pub fn system(&self) -> &str {
        match self {
            Command::Validate { system }
            | Command::Graph { system, .. }
            | Command::Render { system, .. }
            | Command::Act { system, .. }
            | Command::Rules { system, .. }
            | Command::Nucleus { system }
            | Command::Contraction { system, .. }
            | Command::ApComplex { system, .. }
            | Command::ApMap { system }
            | Command::Alpha { system, .. }
            | Command::Aeq { system, .. }
            | Command::Beta { system, .. } => system,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::run(&cli);
    let (code, text, extra) = match result {
        Ok(out) => (out.code, Some(out.text), out.files),
        Err(f) => {
            eprintln!("error: {}", f.message);
            (f.code, None, Vec::new())
        }
    };
    let mut outputs = extra;
    if let Some(text) = &text {
        match &cli.out {
            Some(path) => {
                if let Err(e) = std::fs::write(path, text) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(commands::EXIT_IO);
                }
                outputs.push(path.clone());
            }
            None => {
                let _ = std::io::stdout().write_all(text.as_bytes());
            }
        }
    }
    if let Some(path) = &cli.manifest {
        let m = manifest::RunManifest::new(cli.command.system(), std::env::args().skip(1).collect(), outputs, code);
        if let Err(e) = std::fs::write(path, commands::canonical_json(&m)) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(commands::EXIT_IO);
        }
    }
    ExitCode::from(code)
}
