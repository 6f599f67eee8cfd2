mod app;
mod config;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use app::Kind;
use config::FitArgs;

#[derive(Parser, Debug)]
#[command(name = "simplexfactor", version, about = "Compositional matrix factorization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a model and write the factorization, summary and reports.
    Fit(FitArgs),
    /// Convert a stored factorization to another parametrization.
    Convert {
        #[arg(long)]
        from: PathBuf,
        #[arg(long, value_enum)]
        to: Kind,
        /// Defaults to `<from stem>.<to>.fct` next to the input.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Identifiability report for a stored factorization.
    Diagnose {
        #[arg(long)]
        fct: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write `ident.txt` into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ternary plots (`rows.svg`, `columns.svg`) of a stored K = 3 fit.
    Plot {
        #[arg(long)]
        fct: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// List the bundled datasets.
    Datasets,
}

/// Failure with a stable kind tag for the error record.
#[derive(Debug)]
pub struct CliError {
    kind: String,
    message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            kind: "InvalidConfig".into(),
            message: message.into(),
        }
    }

    fn record(&self) -> String {
        format!("error kind={} message={:?}", self.kind, self.message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<simplexfactor::Error> for CliError {
    fn from(e: simplexfactor::Error) -> Self {
        Self {
            kind: e.kind().into(),
            message: e.to_string(),
        }
    }
}

fn run(cmd: Command, out_dir: &mut Option<PathBuf>) -> Result<(), CliError> {
    match cmd {
        Command::Fit(args) => {
            *out_dir = args.out.clone();
            let cfg = config::load(&args)?;
            *out_dir = Some(cfg.out.clone());
            print!("{}", app::fit(&cfg)?.text());
        }
        Command::Convert { from, to, out } => {
            let path = app::convert(&from, to, out)?;
            println!("wrote {}", path.display());
        }
        Command::Diagnose { fct, seed, out } => {
            *out_dir = out.clone();
            print!("{}", app::diagnose_file(&fct, seed, out.as_deref())?);
        }
        Command::Plot { fct, out } => {
            *out_dir = Some(out.clone());
            app::plot(&fct, &out)?;
        }
        Command::Datasets => print!("{}", app::datasets()?),
    }
    Ok(())
}

fn write_error_file(dir: &Path, record: &str) {
    if std::fs::create_dir_all(dir).is_ok() {
        let _ = std::fs::write(dir.join("error.txt"), format!("{record}\n"));
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out_dir = None;
    match run(cli.command, &mut out_dir) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = e.record();
            eprintln!("{record}");
            if let Some(dir) = out_dir {
                write_error_file(&dir, &record);
            }
            ExitCode::FAILURE
        }
    }
}
