use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rlab_cli::compare::DEFAULT_RTOL;
use rlab_cli::{
    compare_reports, run, CliError, CliResult, Experiment, ExperimentConfig, Report, Status,
    EXIT_FAIL,
};
use rlab_core::counterexample::DEFAULT_PRECISION;

#[derive(Parser)]
#[command(
    name = "rlab",
    version,
    about = "Rademacher sums in weighted symmetric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Seed for every random stream. Required by randomized experiments.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Working precision in bits for certificates.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Write <OUT>.json and <OUT>.csv in addition to printing.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SpaceArgs {
    /// e.g. lp:2, linf, lorentz:sqrt, marcinkiewicz:logpow:1, orlicz:exp:2, explp:1
    #[arg(long)]
    space: String,
    /// e.g. const:1, pow:0.25, logpow:0.5
    #[arg(long)]
    weight: Option<String>,
}

#[derive(Args)]
struct Sampling {
    /// Truncation ranks, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<u32>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// ‖f‖_X, and ‖f‖_{X(w)} when a weight is given.
    Norm {
        #[command(flatten)]
        space: SpaceArgs,
        /// cells:..., indicator:t, rad:k, sum:a1,a2,..., const:c, json:<file>
        #[arg(long)]
        function: String,
    },
    /// Distribution function and decreasing rearrangement.
    Rearrange {
        #[arg(long)]
        function: String,
        /// Second function to test for equimeasurability.
        #[arg(long)]
        other: Option<String>,
    },
    /// Exact Khintchine check for one vector, or for a seeded battery over --n.
    Khintchine {
        #[arg(long)]
        coeffs: Option<String>,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Equivalence constants of {r_k} with the ℓ₂ basis in X(w).
    Equiv {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Bracket for the multiplicator norm ‖f‖_{M(X)} on the Rademacher span.
    Multiplicator {
        #[arg(long)]
        space: String,
        #[arg(long)]
        function: String,
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
        #[arg(long, default_value_t = 200)]
        budget: usize,
    },
    /// Lower bounds for ‖P_n‖ on X(w).
    Projnorm {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Evaluates the membership and boundedness characterizations for (X, w).
    Theorems {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
        #[arg(long, default_value_t = 200)]
        budget: usize,
    },
    /// The block construction separating G ⊂ X from G ⊂ Sym(X).
    Cex {
        #[command(subcommand)]
        action: Cex,
    },
    /// Dilation indices and Δ² of φ, plus the transformed ψ.
    Indices {
        #[arg(long)]
        phi: String,
    },
    /// Runs an experiment from a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compares two JSON reports record by record.
    Compare {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RTOL)]
        rtol: f64,
    },
}

#[derive(Subcommand)]
enum Cex {
    /// Block sizes, prefix sums, heights and the growth condition.
    Plan {
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<u64>,
        #[arg(long)]
        strict: bool,
    },
    /// Explicit step functions for the first blocks.
    Build {
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<u64>,
        #[arg(long, default_value_t = 2)]
        blocks: usize,
    },
    /// Exact certificate for the first blocks.
    #[command(alias = "cert")]
    Certify {
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<u64>,
        #[arg(long, default_value_t = 2)]
        blocks: usize,
    },
}

fn config_for(command: Command, common: &Common) -> ExperimentConfig {
    let mut space = None;
    let mut weight = None;
    let mut n = Vec::new();
    let mut trials = None;
    let mut take_space = |s: SpaceArgs| {
        space = Some(s.space);
        weight = s.weight;
    };
    let experiment = match command {
        Command::Norm { space: s, function } => {
            take_space(s);
            Experiment::Norm { function }
        }
        Command::Rearrange { function, other } => Experiment::Rearrange { function, other },
        Command::Khintchine { coeffs, sampling } => {
            (n, trials) = (sampling.n, sampling.trials);
            Experiment::Khintchine { coeffs }
        }
        Command::Equiv { space: s, sampling } => {
            take_space(s);
            (n, trials) = (sampling.n, sampling.trials);
            Experiment::Equiv
        }
        Command::Multiplicator {
            space: s,
            function,
            n: ranks,
            budget,
        } => {
            space = Some(s);
            n = ranks;
            Experiment::Multiplicator { function, budget }
        }
        Command::Projnorm { space: s, sampling } => {
            take_space(s);
            (n, trials) = (sampling.n, sampling.trials);
            Experiment::Projnorm
        }
        Command::Theorems {
            space: s,
            n: ranks,
            budget,
        } => {
            take_space(s);
            n = ranks;
            Experiment::Theorems { budget }
        }
        Command::Cex { action } => match action {
            Cex::Plan { m, strict } => Experiment::CexPlan { m, strict },
            Cex::Build { m, blocks } => Experiment::CexBuild { m, blocks },
            Cex::Certify { m, blocks } => Experiment::CexCertify { m, blocks },
        },
        Command::Indices { phi } => Experiment::Indices { phi },
        Command::Run { .. } | Command::Compare { .. } => unreachable!("handled by the caller"),
    };
    let mut c = ExperimentConfig::new(experiment);
    c.space = space;
    c.weight = weight;
    c.n = n;
    if let Some(t) = trials {
        c.trials = t;
    }
    c.seed = common.seed;
    c.precision = common.precision.unwrap_or(DEFAULT_PRECISION);
    c.out = common.out.clone();
    c
}

fn render(report: &Report, format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(report.to_json()),
        Format::Csv => report.to_csv(),
    }
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path.display().to_string(), e))
}

fn load_report(path: &Path) -> CliResult<Report> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    Ok(serde_json::from_str(&text)?)
}

fn execute(cli: Cli) -> CliResult<i32> {
    let common = cli.common;
    let config = match cli.command {
        Command::Compare { left, right, rtol } => {
            let diff = compare_reports(&load_report(&left)?, &load_report(&right)?, rtol)?;
            println!("{}", serde_json::to_string_pretty(&diff)?);
            return Ok(if diff.agrees() { 0 } else { EXIT_FAIL });
        }
        Command::Run { config } => {
            let mut c = ExperimentConfig::load(&config)?;
            if common.seed.is_some() {
                c.seed = common.seed;
            }
            if let Some(p) = common.precision {
                c.precision = p;
            }
            if common.out.is_some() {
                c.out = common.out.clone();
            }
            c
        }
        other => config_for(other, &common),
    };
    let report = run(&config)?;
    if let Some(stem) = &config.out {
        write(&stem.with_extension("json"), &report.to_json())?;
        write(&stem.with_extension("csv"), &report.to_csv()?)?;
    }
    print!("{}", render(&report, common.format)?);
    Ok(match report.status {
        Status::Ok => 0,
        Status::Fail => EXIT_FAIL,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
