use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spps::{CliError, Format, IvpInput, Overrides, ProblemFile, RunConfig, Source};
use spps_core::catalog;

#[derive(Parser)]
#[command(name = "spps", version, about = "Eigenvalues of (p u')' + q u = λ r u from power series in λ")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues with residual diagnostics.
    Eigs {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Solution of the initial value problem u(x0) = A, u'(x0) = B at every grid node.
    Ivp {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Spectral parameter (constant expression, e.g. `4` or `1+2*i`).
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long = "a", value_name = "A", allow_hyphen_values = true)]
        a: String,
        #[arg(long = "b", value_name = "B", allow_hyphen_values = true)]
        b: String,
        /// Anchor point; the nearest grid node is used.
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
    },
    /// First eigenvalues of the periodic singular problem for several ε.
    Sweep {
        /// Comma separated ε values in (0, 2).
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// List catalog entries, or print one as a problem file.
    Catalog { name: Option<String> },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ProblemArgs {
    /// Catalog entry name (see `spps catalog`).
    #[arg(long)]
    catalog: Option<String>,
    /// JSON problem file.
    #[arg(long)]
    problem: Option<PathBuf>,
}

impl ProblemArgs {
    fn source(&self) -> Source {
        match (&self.catalog, &self.problem) {
            (Some(c), _) => Source::Catalog(c.clone()),
            (None, Some(p)) => Source::File(p.clone()),
            (None, None) => unreachable!("clap enforces one source"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// Grid cells M [default: 2000].
    #[arg(long)]
    grid: Option<usize>,
    /// Series truncation N [default: 60].
    #[arg(long)]
    powers: Option<usize>,
    /// Decimal digits; 15 runs in hardware floating point [default: 34].
    #[arg(long)]
    digits: Option<u32>,
    #[arg(long, default_value_t = 5)]
    count: usize,
    /// auto, none, or comma separated shift points.
    #[arg(long, default_value = "auto")]
    shift: String,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use the problem's recommended M, N and digits for unset flags.
    #[arg(long)]
    recommended: bool,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides { grid: self.grid, powers: self.powers, digits: self.digits }
    }

    fn base(&self) -> Result<RunConfig, CliError> {
        let d = RunConfig::default();
        Ok(RunConfig {
            grid: self.grid.unwrap_or(d.grid),
            powers: self.powers.unwrap_or(d.powers),
            digits: self.digits.unwrap_or(d.digits),
            count: self.count,
            shift: spps::parse_shift(&self.shift)?,
            tol: self.tol,
            format: match self.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            },
        })
    }

    fn config(&self, entry: &catalog::CatalogEntry) -> Result<RunConfig, CliError> {
        let base = self.base()?;
        Ok(if self.recommended { self.overrides().apply(&base, entry) } else { base })
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eigs { problem, run } => {
            let entry = problem.source().load()?;
            let cfg = run.config(&entry)?;
            let rows = spps::eigs(&entry, &cfg)?;
            run.emit(&spps::render(&rows, cfg.format)?)
        }
        Command::Ivp { problem, run, lambda, a, b, x0 } => {
            let entry = problem.source().load()?;
            let cfg = run.config(&entry)?;
            let rows = spps::ivp(&entry, &cfg, &IvpInput { lambda, a, b, x0 })?;
            run.emit(&spps::render(&rows, cfg.format)?)
        }
        Command::Sweep { eps, run } => {
            let base = run.base()?;
            let (rows, failures) = spps::sweep(&eps, &base, &run.overrides())?;
            let all_failed = failures.len() == eps.len();
            let mut first = None;
            for (e, err) in failures {
                eprintln!("spps: epsilon {e}: {err}");
                first.get_or_insert(err);
            }
            run.emit(&spps::render(&rows, base.format)?)?;
            match first {
                Some(err) if all_failed => Err(err),
                _ => Ok(()),
            }
        }
        Command::Catalog { name: Some(name) } => {
            let entry = Source::Catalog(name).load()?;
            println!("{}", ProblemFile::from_entry(&entry).to_json());
            Ok(())
        }
        Command::Catalog { name: None } => {
            println!("name,M,N,digits,references");
            for name in catalog::names() {
                let e = catalog::by_name(name)?;
                let r = e.recommended;
                println!("{name},{},{},{},{}", r.grid, r.powers, r.digits, e.references.len());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spps: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
