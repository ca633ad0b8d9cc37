use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use ambient_cli::commands::{self, ApplyOp};
use ambient_cli::config::{rational, read_tensor, RunConfig};
use ambient_cli::report::{self, Format};
use ambient_cli::suites::{self, Runner, Suite};
use ambient_cli::CliError;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "ambient", version, about = "Exact ambient-metric checks for GJMS operators on symmetric 2-tensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and stream one report per claim.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[command(flatten)]
        common: Common,
    },
    /// Print the shifts of P_k on TT tensors of an Einstein metric.
    Factors {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "0")]
        lambda: String,
        /// Smallest TT eigenvalue of Delta_L; prints the Hessian verdict.
        #[arg(long = "at-alpha", visible_alias = "alpha")]
        alpha: Option<String>,
        #[arg(long, value_enum, default_value_t = FormatArg::Table)]
        format: FormatArg,
    },
    /// Apply an operator to a tensor read from a JSON file.
    Apply {
        #[arg(value_enum)]
        op: OpArg,
        #[arg(long)]
        phi: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Einstein constant, an exact rational such as 1/2.
    #[arg(long)]
    lambda: Option<String>,
    /// Sectional curvature of the space-form model.
    #[arg(long)]
    c: Option<String>,
    /// flat, space-form or custom (with --metric).
    #[arg(long)]
    model: Option<String>,
    /// Chart metric for --model custom, in the tensor JSON format.
    #[arg(long)]
    metric: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Work modulo rho^(N+1).
    #[arg(long)]
    trunc: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Ndjson)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Sl2,
    AmbientEinstein,
    EinsteinLaplacian,
    Lift,
    Harmonic,
    ObstructionFlat,
    Sphere,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    Pk,
    Lift,
    Lichnerowicz,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Ndjson,
    Csv,
    Table,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Ndjson => Format::Ndjson,
            FormatArg::Csv => Format::Csv,
            FormatArg::Table => Format::Table,
        }
    }
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Sl2 => Suite::Sl2,
            SuiteArg::AmbientEinstein => Suite::AmbientEinstein,
            SuiteArg::EinsteinLaplacian => Suite::EinsteinLaplacian,
            SuiteArg::Lift => Suite::Lift,
            SuiteArg::Harmonic => Suite::Harmonic,
            SuiteArg::ObstructionFlat => Suite::ObstructionFlat,
            SuiteArg::Sphere => Suite::Sphere,
            SuiteArg::All => Suite::All,
        }
    }
}

impl Common {
    fn config(&self) -> Result<RunConfig, CliError> {
        let lambda = self.lambda.as_deref().map(|s| rational("--lambda", s)).transpose()?;
        let c = self.c.as_deref().map(|s| rational("--c", s)).transpose()?;
        let model = RunConfig::resolve_model(self.model.as_deref(), c, lambda.as_ref(), self.metric.as_deref())?;
        Ok(RunConfig { n: self.n, k: self.k, lambda, trunc: self.trunc, model, seed: self.seed })
    }

    fn sink(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        })
    }
}

fn verify(suite: Suite, common: &Common) -> Result<i32, CliError> {
    let cfg = common.config()?;
    let format = Format::from(common.format);
    let mut out = common.sink()?;
    report::write_header(&mut out, format)?;
    let mut emit = |d: &report::ReportDoc| -> io::Result<()> {
        report::write_doc(&mut out, format, d)?;
        out.flush()
    };
    let mut runner = Runner::new(&mut emit);
    suites::run(suite, &cfg, &mut runner)?;
    let code = runner.exit_code();
    eprintln!("{}: {} pass, {} fail, {} skipped", suite.name(), runner.passed, runner.failed, runner.skipped);
    if let Some((needed, available)) = runner.truncation {
        let order = runner.sufficient_order.unwrap_or(0).max(needed).max(common.trunc.map_or(0, |t| t + 2));
        eprintln!("truncation shortfall: a step needed order {needed} and had {available}; rerun with --trunc {}", order - 1);
    }
    Ok(code)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Verify { suite, common } => verify(suite.into(), &common),
        Command::Factors { n, k, lambda, alpha, format } => {
            let lambda = rational("--lambda", &lambda)?;
            let alpha = alpha.as_deref().map(|a| rational("--at-alpha", a)).transpose()?;
            let r = commands::factors(n, k, &lambda, alpha.as_ref())?;
            let mut out = io::stdout().lock();
            commands::write_factors(&mut out, format.into(), &r)?;
            Ok(0)
        }
        Command::Apply { op, phi, common } => {
            let cfg = common.config()?;
            let phi = read_tensor(&phi)?;
            let op = match op {
                OpArg::Pk => ApplyOp::Pk,
                OpArg::Lift => ApplyOp::Lift,
                OpArg::Lichnerowicz => ApplyOp::Lichnerowicz,
            };
            let value = commands::apply(op, &cfg, &phi)?;
            let mut out = common.sink()?;
            writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("json value serialises"))?;
            out.flush()?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            // a closed pipe downstream (`| head`) is not worth a message
            if !matches!(&e, CliError::Io(io) if io.kind() == io::ErrorKind::BrokenPipe) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
