//! `sharpconc`: batch runner for the verification suite.

// `!(x > 0.0)` style guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod report;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::config::{ConfigError, Format, RunConfig, Settings};
use crate::report::{write_profile_csv, write_records_csv, Report};

/// Usage or configuration error.
const EXIT_USAGE: u8 = 64;
/// Output could not be written.
const EXIT_IO: u8 = 74;

#[derive(Parser, Debug)]
#[command(
    name = "sharpconc",
    version,
    about = "Verification suite for sharp concentration bounds in weighted Bergman spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Exact symmetric-function and coefficient checks.
    VerifyExact,
    /// Concentration profiles against the sharp bound.
    Profile,
    /// Large-weight limit integrals.
    Fock,
    /// Sign of the log-Laplacian numerator of the weight.
    Lemma22,
    /// Circle equality in the hyperbolic isoperimetric inequality.
    Isoperimetry,
    /// Every command above.
    All,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::VerifyExact => "verify-exact",
            Command::Profile => "profile",
            Command::Fock => "fock",
            Command::Lemma22 => "lemma22",
            Command::Isoperimetry => "isoperimetry",
            Command::All => "all",
        }
    }
}

#[derive(Args, Debug, Default)]
struct Options {
    /// Weight parameters, comma-separated rationals such as `2,5/2`.
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// Derivative orders: `a..b` or a comma-separated list.
    #[arg(long = "n", global = true)]
    n: Option<String>,
    /// Largest index of the exact symmetric-function scan.
    #[arg(long, global = true)]
    l_max: Option<String>,
    /// Largest coefficient index of the identity and integral checks.
    #[arg(long, global = true)]
    k_max: Option<String>,
    /// Largest index of the coefficient-ratio scan.
    #[arg(long, global = true)]
    c_k_max: Option<String>,
    /// Measure values: `geom:lo:hi:count` or an increasing list.
    #[arg(long, global = true)]
    s_grid: Option<String>,
    /// Numerical tolerance.
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Input functions: `one`, `monomial:k`, `kernel:w`.
    #[arg(long, global = true, alias = "function")]
    functions: Option<String>,
    /// Measure variants: `mu`, `nu`.
    #[arg(long, global = true, alias = "variant")]
    variants: Option<String>,
    /// Increasing weights for the large-weight convergence rows.
    #[arg(long, global = true)]
    r_list: Option<String>,
    /// Output format.
    #[arg(long, global = true, value_parser = ["json", "csv"])]
    format: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// File of `key = value` settings, overridden by flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl Options {
    fn settings(&self) -> Result<Settings, ConfigError> {
        let mut s = Settings::default();
        if let Some(path) = &self.config {
            s.load(path)?;
        }
        let flags = [
            ("alpha", &self.alpha),
            ("n", &self.n),
            ("l_max", &self.l_max),
            ("k_max", &self.k_max),
            ("c_k_max", &self.c_k_max),
            ("s_grid", &self.s_grid),
            ("tol", &self.tol),
            ("functions", &self.functions),
            ("variants", &self.variants),
            ("r_list", &self.r_list),
            ("format", &self.format),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                s.set(key, v.as_str())?;
            }
        }
        Ok(s)
    }
}

fn resolve(cli: &Cli) -> Result<Vec<RunConfig>, ConfigError> {
    let settings = cli.opts.settings()?;
    let names: Vec<&str> = match cli.command {
        Command::All => commands::COMMANDS.to_vec(),
        c => vec![c.name()],
    };
    names
        .into_iter()
        .map(|name| RunConfig::resolve(name, &settings))
        .collect()
}

fn write_output(
    cli: &Cli,
    report: &Report,
    rows: &[report::ProfileRow],
    format: Format,
) -> io::Result<()> {
    let mut sink: Box<dyn Write> = match &cli.opts.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match format {
        Format::Json => report.write_json(&mut sink)?,
        Format::Csv if cli.command == Command::Profile => write_profile_csv(rows, &mut sink)?,
        Format::Csv => write_records_csv(&report.records, &mut sink)?,
    }
    sink.flush()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let configs = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("sharpconc: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Some(jobs) = cli.opts.jobs {
        let built = (jobs > 0)
            .then(|| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(jobs)
                    .build_global()
                    .ok()
            })
            .flatten();
        if built.is_none() {
            eprintln!("sharpconc: --jobs must be a positive thread count");
            return ExitCode::from(EXIT_USAGE);
        }
    }

    let start = Instant::now();
    let mut records = Vec::new();
    let mut rows = Vec::new();
    let mut timings = BTreeMap::new();
    for config in &configs {
        let t0 = Instant::now();
        match commands::run(config) {
            Ok(section) => {
                records.extend(section.records);
                rows.extend(section.rows);
            }
            Err(e) => {
                eprintln!("sharpconc: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
        }
        timings.insert(config.command.clone(), t0.elapsed().as_secs_f64());
    }
    timings.insert("total".into(), start.elapsed().as_secs_f64());

    let format = configs[0].format;
    let report = Report::new(configs, records, timings);
    if let Err(e) = write_output(&cli, &report, &rows, format) {
        eprintln!("sharpconc: cannot write output: {e}");
        return ExitCode::from(EXIT_IO);
    }
    let s = &report.summary;
    eprintln!(
        "sharpconc {}: {} records, {} pass, {} violation, {} finding, {} non-convergent (run {})",
        cli.command.name(),
        s.total,
        s.pass,
        s.violation,
        s.finding,
        s.non_convergent,
        &report.run_id[..12]
    );
    ExitCode::from(s.exit_code())
}
