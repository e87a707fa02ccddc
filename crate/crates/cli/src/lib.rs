//! Command-line front end for `nodal-theta`.
//!
//! [`run`] parses arguments, dispatches to the library and returns the exit
//! status together with the text for standard output and standard error.
//! Reports are canonical JSON: sorted keys, compact, exact rationals as
//! strings.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
pub mod golden;
mod input;
mod report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_ASSERTION: i32 = 3;

/// Environment override for the default base truncation `N`.
pub const ENV_N: &str = "NODAL_THETA_N";
/// Environment override for the default `t_max`.
pub const ENV_TMAX: &str = "NODAL_THETA_TMAX";

pub const DEFAULT_N: u32 = 16;

#[derive(Debug)]
pub enum CliError {
    Lib(nodal_theta::Error),
    Input(String),
    /// A check performed by the CLI itself failed (golden mismatches).
    Check(String),
}

impl From<nodal_theta::Error> for CliError {
    fn from(e: nodal_theta::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) if e.is_assertion() => EXIT_ASSERTION,
            CliError::Check(_) => EXIT_ASSERTION,
            _ => EXIT_PRECONDITION,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Lib(e) => e.to_string(),
            CliError::Input(m) => format!("invalid-input: {m}"),
            CliError::Check(m) => m.clone(),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "nodal-theta", version, about = "Local multiplicities on nodal models and theta divisors of nodal curves")]
struct Cli {
    /// Seed for every random choice; echoed in the report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Base truncation N for arcs and families (env NODAL_THETA_N).
    #[arg(long = "n", global = true)]
    n: Option<u32>,
    /// Largest t for Hilbert–Samuel tables (env NODAL_THETA_TMAX).
    #[arg(long, global = true)]
    tmax: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Standard model, e.g. `n=1,m=1`.
    #[arg(long)]
    model: String,
    /// Element of the model as an expression.
    #[arg(long)]
    f: String,
    /// Aliases for model variables, e.g. `x=u1,y=v1`.
    #[arg(long)]
    bind: Option<String>,
}

#[derive(Args, Debug)]
struct CurveArgs {
    /// Curve JSON (inline or file path); may carry the sheaf under "sheaf".
    #[arg(long)]
    curve: String,
    /// Sheaf JSON (inline or file path).
    #[arg(long)]
    sheaf: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Multiplicities of V(f) on a standard model.
    Mult(ModelArgs),
    /// Order of f at the origin, per branch and by the oracle.
    Ord(ModelArgs),
    /// Contact of a given arc, or a minimal arc when no arc is given.
    Arc {
        #[command(flatten)]
        model: ModelArgs,
        /// Arc JSON: {"images": {"u1": "0", "v1": "t"}, "N": 16}.
        #[arg(long)]
        arc: Option<String>,
        /// Look for a minimal arc factoring through Z.
        #[arg(long)]
        through_z: bool,
    },
    /// Samples random arcs and checks contact >= ord.
    ArcsSample {
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        bind: Option<String>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Parametrized arcs on the cusp cylinder y^2 = x^3 in (x, y, z).
        #[arg(long)]
        cusp: bool,
    },
    /// Hilbert–Samuel table of K[[vars]]/(rel..., f).
    Hs {
        /// Comma-separated variable names.
        #[arg(long)]
        vars: String,
        #[arg(long = "rel")]
        rels: Vec<String>,
        #[arg(long)]
        f: Option<String>,
    },
    /// h0 and h1 of a sheaf.
    CurveH0(CurveArgs),
    /// Theta invariants of a degree g-1 sheaf.
    Theta(CurveArgs),
    /// Position relative to the singular locus of theta.
    Classify(CurveArgs),
    /// Theta order along a family (a minimal family when none is given).
    Family {
        #[command(flatten)]
        curve: CurveArgs,
        /// Family JSON: {"N": 16, "glue": {"0": "1+t"}, "moving": [...], "aux": [2]}.
        #[arg(long)]
        family: Option<String>,
    },
    /// Checks ord = h0 with a minimal family and the lower bound on random ones.
    #[command(name = "verify-A")]
    VerifyA {
        #[command(flatten)]
        curve: CurveArgs,
        /// Random gluing families to test.
        #[arg(long, default_value_t = 3)]
        families: usize,
    },
    /// Runs a directory of golden input/output pairs.
    Golden { dir: PathBuf },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Settings resolved from flags, environment and defaults.
struct Settings {
    seed: u64,
    n: u32,
    tmax: u32,
}

fn env_u32(key: &str) -> Result<Option<u32>, CliError> {
    match std::env::var(key) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| CliError::Input(format!("{key} must be a nonnegative integer"))),
        Err(_) => Ok(None),
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PRECONDITION } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: format!("invalid-input: {text}") }
            };
        }
    };
    let format = cli.format;
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(cli)));
    match result {
        Ok(Ok(out)) => Outcome {
            code: out.code,
            stdout: match format {
                Format::Json => format!("{}\n", report::canonical(&out.report)),
                Format::Table => report::table(&out.report),
            },
            stderr: out.stderr,
        },
        Ok(Err(e)) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {}\n", e.message()) },
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome { code: EXIT_ASSERTION, stdout: String::new(), stderr: format!("error: internal-panic: {msg}\n") }
        }
    }
}

/// A report plus a nonstandard exit code (golden failures).
pub(crate) struct Report {
    pub report: serde_json::Value,
    pub code: i32,
    pub stderr: String,
}

fn dispatch(cli: Cli) -> Result<Report, CliError> {
    let settings = Settings {
        seed: cli.seed,
        n: cli.n.map_or_else(|| env_u32(ENV_N).map(|v| v.unwrap_or(DEFAULT_N)), Ok)?,
        tmax: cli
            .tmax
            .map_or_else(|| env_u32(ENV_TMAX).map(|v| v.unwrap_or(nodal_theta::multiplicity::DEFAULT_T_MAX)), Ok)?,
    };
    let value = match cli.command {
        Command::Mult(a) => commands::mult(&settings, &a.model, &a.f, a.bind.as_deref())?,
        Command::Ord(a) => commands::ord(&settings, &a.model, &a.f, a.bind.as_deref())?,
        Command::Arc { model, arc, through_z } => {
            commands::arc(&settings, &model.model, &model.f, model.bind.as_deref(), arc.as_deref(), through_z)?
        }
        Command::ArcsSample { model, f, bind, count, cusp } => {
            commands::arcs_sample(&settings, model.as_deref(), f.as_deref(), bind.as_deref(), count, cusp)?
        }
        Command::Hs { vars, rels, f } => commands::hs(&settings, &vars, &rels, f.as_deref())?,
        Command::CurveH0(c) => commands::curve_h0(&settings, &c.curve, c.sheaf.as_deref())?,
        Command::Theta(c) => commands::theta(&settings, &c.curve, c.sheaf.as_deref())?,
        Command::Classify(c) => commands::classify(&settings, &c.curve, c.sheaf.as_deref())?,
        Command::Family { curve, family } => {
            commands::family(&settings, &curve.curve, curve.sheaf.as_deref(), family.as_deref())?
        }
        Command::VerifyA { curve, families } => {
            commands::verify_a(&settings, &curve.curve, curve.sheaf.as_deref(), families)?
        }
        Command::Golden { dir } => {
            let summary = golden::golden_suite(&dir).map_err(|e| CliError::Input(e.to_string()))?;
            let code = if summary.all_passed() { EXIT_OK } else { EXIT_ASSERTION };
            return Ok(Report { report: summary.to_json(), code, stderr: summary.diffs() });
        }
    };
    Ok(Report { report: value, code: EXIT_OK, stderr: String::new() })
}
