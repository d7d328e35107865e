mod commands;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use liftable_core::germs::InvariantMode;

use crate::report::Report;

/// Relative input paths resolve against this directory when it is set.
pub const WORKDIR_ENV: &str = "LIFTABLE_WORKDIR";

#[derive(Parser, Debug)]
#[command(name = "liftable", version, about = "Liftable vector fields and Kodaira-Spencer-Mather invariants of corank-one multigerms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args, Debug, Clone)]
pub struct Flags {
    /// Highest level of the reduced Kodaira-Spencer-Mather map scanned [default: 6].
    #[arg(long, global = true)]
    pub max_i: Option<usize>,
    /// Degree bound for polynomial completions [default: 12].
    #[arg(long, global = true)]
    pub max_degree: Option<u32>,
    /// Source jet order of lift certificates [default: depends on the construction].
    #[arg(long, global = true)]
    pub cert_order: Option<u32>,
    /// Emit the JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// How level invariants are computed.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Both)]
    pub mode: ModeArg,
    /// Shifts the formula side of every formula/elimination comparison by one.
    #[arg(long, global = true, hide = true)]
    pub inject_mismatch: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Formula,
    Bruteforce,
    Both,
}

impl ModeArg {
    pub fn invariant_mode(self) -> InvariantMode {
        match self {
            ModeArg::Formula => InvariantMode::Formula,
            ModeArg::Bruteforce => InvariantMode::Bruteforce,
            ModeArg::Both => InvariantMode::BothAgree,
        }
    }
}

/// A germ document, from a file or from the built-in catalog.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// Path to a germ document.
    pub document: Option<PathBuf>,
    /// Name of a built-in catalog entry.
    #[arg(long)]
    pub catalog: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    /// First applicable construction, in order of preference.
    Auto,
    /// Kernel completion; needs i1 = i2.
    Kernel,
    /// Fields tangent to the image; plane curves only.
    Image,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariants, stability and the levels of the reduced Kodaira-Spencer-Mather maps.
    Analyze {
        #[command(flatten)]
        input: Input,
    },
    /// Kernel basis of the reduced map at one level.
    Kernel {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        level: usize,
    },
    /// Constructs and certifies a generating set of the liftable fields.
    Construct {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = RouteArg::Auto)]
        route: RouteArg,
    },
    /// Liftable fields by restricting a stable one-parameter unfolding.
    Unfold {
        #[command(flatten)]
        input: Input,
        /// Monomial degree bound when the document declares no unfolding [default: 2].
        #[arg(long)]
        search_degree: Option<u32>,
    },
    /// Verifies claimed liftable fields read from a file of tuples.
    Check {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        fields: PathBuf,
    },
    /// Moves the liftable fields along the document's target diffeomorphism.
    Transport {
        #[command(flatten)]
        input: Input,
    },
    /// Removes quadratic suspension variables and constructs on the core germ.
    Reduce {
        #[command(flatten)]
        input: Input,
    },
    /// Lists, prints or runs the built-in examples.
    Catalog {
        /// Print the document text of one entry.
        #[arg(long, conflicts_with = "run_all")]
        show: Option<String>,
        /// Analyze and construct every entry, in parallel.
        #[arg(long)]
        run_all: bool,
    },
}

/// Resolves `path` against the work directory override when it is relative.
pub fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(WORKDIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = cli.flags;
    let report = match cli.command {
        Command::Analyze { input } => commands::analyze(&input, &flags),
        Command::Kernel { input, level } => commands::kernel(&input, level, &flags),
        Command::Construct { input, route } => commands::construct(&input, route, &flags),
        Command::Unfold { input, search_degree } => commands::unfold(&input, search_degree, &flags),
        Command::Check { input, fields } => commands::check(&input, &fields, &flags),
        Command::Transport { input } => commands::transport(&input, &flags),
        Command::Reduce { input } => commands::reduce(&input, &flags),
        Command::Catalog { show, run_all } => commands::catalog(show.as_deref(), run_all, &flags),
    };
    emit(&report, flags.json)
}

fn emit(report: &Report, json: bool) -> ExitCode {
    if json {
        match serde_json::to_string_pretty(report) {
            Ok(s) => println!("{s}"),
            Err(e) => {
                eprintln!("error: cannot serialize the report: {e}");
                return ExitCode::from(4);
            }
        }
    } else {
        print!("{}", report.render_text());
        if let Some(e) = &report.error {
            eprintln!("error: {}", e.message);
        }
    }
    ExitCode::from(report.exit_code())
}
