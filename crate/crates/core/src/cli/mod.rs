//! Batch front-end: JSON run configurations in, CSV/SVG tables and a
//! `summary.txt` out.

pub mod config;
pub mod output;
mod scenarios;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::Result;
pub use config::{RunConfig, Scenario};
pub use output::{fmt_num, Summary, Table};

#[derive(Debug, Parser)]
#[command(name = "cavity-cps", version, about = "Conditional phase gates in a three-mode cavity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    /// Parse an argument list whose first element is the program name.
    pub fn from_args<I, T>(args: I) -> std::result::Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        Self::try_parse_from(args)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Execute a scenario described by a JSON config.
    Run(RunArgs),
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    pub config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Scenario (overrides `scenario`).
    #[arg(long, value_enum)]
    pub scenario: Option<Scenario>,
    /// Seed for randomized parameter draws (overrides `seed`).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Do not print the summary.
    #[arg(long)]
    pub quiet: bool,
}

/// Result of one scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub scenario: Scenario,
    pub table: Table,
    pub summary: Summary,
    /// One line per failed assertion.
    pub failures: Vec<String>,
    pub out_dir: PathBuf,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Execute a scenario, write its artifacts and evaluate the assertions.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let (table, summary) = scenarios::execute(config)?;
    let dir = config.output.dir.clone();
    let name = config.scenario.name();
    for format in &config.output.formats {
        match format {
            config::Format::Csv => output::write_file(&dir, &format!("{name}.csv"), &table.to_csv())?,
            config::Format::Svg => output::write_file(&dir, &format!("{name}.svg"), &table.to_svg(name))?,
        }
    }
    output::write_file(&dir, "summary.txt", &summary.render())?;
    let failures = check_assertions(&config.assertions, &summary);
    Ok(RunOutcome { scenario: config.scenario, table, summary, failures, out_dir: dir })
}

pub fn check_assertions(assertions: &[config::Assertion], summary: &Summary) -> Vec<String> {
    assertions
        .iter()
        .filter_map(|a| {
            let Some(v) = summary.get(&a.name) else {
                return Some(format!("assertion `{}` failed: no such summary key", a.name));
            };
            let low = a.min.is_some_and(|m| !(v >= m));
            let high = a.max.is_some_and(|m| !(v <= m));
            (low || high).then(|| {
                format!(
                    "assertion `{}` failed: value {} outside [{}, {}]",
                    a.name,
                    fmt_num(v),
                    a.min.map_or("-inf".into(), fmt_num),
                    a.max.map_or("inf".into(), fmt_num),
                )
            })
        })
        .collect()
}

/// Load a config file and apply command-line overrides.
pub fn load_with_overrides(args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(out) = &args.out {
        cfg.output.dir = out.clone();
    } else if cfg.output.dir.is_relative() {
        cfg.output.dir = base_dir(&args.config).join(&cfg.output.dir);
    }
    if let Some(s) = args.scenario {
        cfg.scenario = s;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn base_dir(config: &Path) -> PathBuf {
    config.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Process exit code: 0 on success, 1 when an assertion fails, 2 on error.
pub fn main_with(cli: Cli) -> i32 {
    let Command::Run(args) = cli.command;
    let outcome = load_with_overrides(&args).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(outcome) => {
            if !args.quiet {
                print!("{}", outcome.summary.render());
            }
            for line in &outcome.failures {
                eprintln!("{line}");
            }
            if outcome.passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
