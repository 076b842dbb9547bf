//! The `moderf` command line: argument parsing, exit codes and dispatch.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
//! or I/O failure.

mod commands;
pub mod table;
pub mod verify;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::BackendChoice;
use crate::error::Error;
use crate::SolverConfig;
use table::OutputTable;

pub use commands::{cmd_delta0, cmd_eval, cmd_figure, cmd_solve, EvalFn, FigureId};
pub use verify::{cmd_verify, Suite, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "moderf",
    version,
    about = "Modified error function: solvers, series approximations and checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a special function or series coefficient at the given points.
    Eval(EvalArgs),
    /// Solve the boundary value problem for one δ and print (x, Φ_δ(x)).
    Solve(SolveArgs),
    /// Print δ₀, the contraction constant C and the Lipschitz constant L.
    Delta0(Delta0Args),
    /// Write the data behind one figure, one CSV per curve.
    Figure(FigureArgs),
    /// Run a verification suite; exits 1 if a hard check fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    pub function: EvalFn,
    /// Comma-separated evaluation points.
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    pub x: Vec<f64>,
    /// Required by `psi`, rejected otherwise.
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Series order for `psi`.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=2))]
    pub m: Option<u8>,
    /// Absolute tolerance of the φ₂ quadrature.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write `eval.csv` into this directory instead of printing.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Grid and tolerance flags shared by the solving commands.
#[derive(Debug, Clone, Copy, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 10.0)]
    pub xmax: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// Stopping tolerance of the Picard iteration and the shooting root search.
    #[arg(long)]
    pub tol: Option<f64>,
}

impl GridArgs {
    pub fn solver_config(&self) -> Result<SolverConfig, CliError> {
        let mut cfg = SolverConfig::with_grid(self.xmax, self.step);
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::Usage(format!(
                    "--tol must be positive, got {tol}"
                )));
            }
            cfg.picard.fp_tol = tol;
            cfg.shooting.root_tol = tol;
        }
        cfg.picard.validate()?;
        cfg.shooting.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Picard,
    Shooting,
    Auto,
}

impl From<BackendArg> for BackendChoice {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Picard => BackendChoice::Picard,
            BackendArg::Shooting => BackendChoice::Shooting,
            BackendArg::Auto => BackendChoice::Auto,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    pub backend: BackendArg,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Write `solve.csv` into this directory instead of printing.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Delta0Args {
    /// Bisection bracket width; machine precision when omitted.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write `delta0.csv` into this directory instead of printing.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub id: FigureId,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Write `verify_<suite>.csv` into this directory instead of printing.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    /// Invalid inputs caught by the library (bad grid, δ ≤ −1, …) are usage
    /// errors; everything else raised while computing is a failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numeric(
                Error::InvalidArgument(_) | Error::InvalidGrid(_) | Error::DeltaBelowMinusOne(_),
            ) => EXIT_USAGE,
            CliError::Numeric(_) | CliError::Io { .. } => EXIT_FAILURE,
        }
    }
}

/// `# key = value` lines echoing every setting that influenced a solve.
pub(crate) fn config_lines(cfg: &SolverConfig) -> Vec<(String, String)> {
    let p = &cfg.picard;
    let s = &cfg.shooting;
    [
        ("x_max", p.x_max.to_string()),
        ("step", p.step.to_string()),
        ("picard.fp_tol", p.fp_tol.to_string()),
        ("picard.max_iter", p.max_iter.to_string()),
        ("shooting.ivp_tol", s.ivp_tol.to_string()),
        (
            "shooting.slope_bracket",
            format!("[{}, {}]", s.slope_bracket.0, s.slope_bracket.1),
        ),
        ("shooting.root_tol", s.root_tol.to_string()),
        ("shooting.max_root_iter", s.max_root_iter.to_string()),
        ("quad.abs_tol", cfg.quad.abs_tol.to_string()),
        ("quad.max_depth", cfg.quad.max_depth.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_owned(), v))
    .collect()
}

/// A table that starts with the program name, version and command.
pub(crate) fn table_for(command: &str, name: impl Into<String>, columns: &[&str]) -> OutputTable {
    let mut t = OutputTable::new(name, columns);
    t.comment("program", concat!("moderf ", env!("CARGO_PKG_VERSION")));
    t.comment("command", command);
    t
}

fn emit(
    table: &OutputTable,
    out_dir: Option<&PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    match out_dir {
        Some(dir) => {
            let paths = table::write_all(std::slice::from_ref(table), dir).map_err(|source| {
                CliError::Io {
                    path: dir.clone(),
                    source,
                }
            })?;
            for p in paths {
                let _ = writeln!(stderr, "wrote {}", p.display());
            }
        }
        None => stdout
            .write_all(&table.to_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })?,
    }
    Ok(())
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Eval(args) => {
            let t = cmd_eval(&args)?;
            emit(&t, args.out.as_ref(), stdout, stderr)?;
        }
        Command::Solve(args) => {
            let t = cmd_solve(&args)?;
            emit(&t, args.out.as_ref(), stdout, stderr)?;
        }
        Command::Delta0(args) => {
            let t = cmd_delta0(&args)?;
            emit(&t, args.out.as_ref(), stdout, stderr)?;
        }
        Command::Figure(args) => {
            let tables = cmd_figure(args.id, &args.grid)?;
            let paths = table::write_all(&tables, &args.out).map_err(|source| CliError::Io {
                path: args.out.clone(),
                source,
            })?;
            for p in paths {
                let _ = writeln!(stderr, "wrote {}", p.display());
            }
        }
        Command::Verify(args) => {
            let report = cmd_verify(args.suite, &args.grid)?;
            emit(&report.table, args.out.as_ref(), stdout, stderr)?;
            let failures = report.failures();
            if !failures.is_empty() {
                for f in &failures {
                    let _ = writeln!(stderr, "FAIL {f}");
                }
                return Ok(EXIT_VERIFICATION);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command, returning the exit code.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{rendered}");
            return EXIT_OK;
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.exit_code() == EXIT_USAGE {
                let _ = writeln!(stderr, "\nFor more information, try '--help'.");
            }
            e.exit_code()
        }
    }
}

/// Entry point of the `moderf` binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run(std::env::args_os(), &mut out, &mut err);
    let _ = out.flush();
    code
}
