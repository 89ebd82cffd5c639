//! Command-line front end: closed-form evaluation, simulation, parameter
//! sweeps and spatial statistics of AP location files.

pub mod apfile;
pub mod commands;
pub mod error;
pub mod scenario;
pub mod table;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use wlan_offload::exec::{limit_threads, Exec};
use wlan_offload::formulas::Mode;

pub use error::CliError;
use scenario::Scenario;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "OFFLOAD_GEOM_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeSel {
    Homo,
    Inhomo,
    Baseline,
    All,
}

impl ModeSel {
    pub fn modes(self) -> Vec<Mode> {
        match self {
            ModeSel::Homo => vec![Mode::Homogeneous],
            ModeSel::Inhomo => vec![Mode::Inhomogeneous],
            ModeSel::Baseline => vec![Mode::Baseline],
            ModeSel::All => vec![Mode::Homogeneous, Mode::Inhomogeneous, Mode::Baseline],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "offload", version, about = "WLAN offloading metrics, simulation and AP statistics")]
pub struct Cli {
    /// Overrides sim.seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "all")]
    pub mode: ModeSel,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Index of dispersion per operator and pairwise count correlations.
    Stats {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Quadrat side (m).
        #[arg(long, default_value_t = 100.0)]
        atom: f64,
    },
    /// Classify grid atoms into high, low and base density regions.
    Identify {
        file: PathBuf,
        /// Atom side (m).
        #[arg(long, default_value_t = 100.0)]
        atom: f64,
        /// Window side in atoms.
        #[arg(long, default_value_t = 3)]
        n0: usize,
    },
    /// Closed-form metrics.
    Eval { scenario: PathBuf },
    /// Monte Carlo estimates with standard errors.
    Simulate { scenario: PathBuf },
    /// Closed-form metrics over a list of values of one parameter:
    /// `key=v1,v2,…` or `key=start:stop:step` with key one of
    /// l, rho_h, rho_l, frac_h, frac_l, arc_h, arc_l, a.
    Sweep { scenario: PathBuf, sweep: String },
    /// Closed form and simulation side by side.
    Compare { scenario: PathBuf },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_scenario(path: &Path, seed: Option<u64>) -> Result<Scenario, CliError> {
    let mut s = Scenario::parse(&read(path)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if let Some(seed) = seed {
        s.seed = seed;
    }
    Ok(s)
}

/// Applies the thread cap from the environment, if any.
pub fn apply_thread_limit() -> Result<(), CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|n| *n > 0)
                .ok_or_else(|| CliError::Config(format!("{THREADS_ENV}='{v}' is not a positive integer")))?;
            limit_threads(n);
            Ok(())
        }
        Err(_) => Ok(()),
    }
}

/// Output text and any warnings for stderr.
pub struct Output {
    pub text: String,
    pub warnings: Vec<String>,
}

fn handover_warnings(t: &table::Table) -> Vec<String> {
    let Some(c) = t.column("handover_warning") else {
        return Vec::new();
    };
    if t.rows.iter().any(|r| r[c] == "true") {
        vec![format!(
            "n_h from the inhomogeneous formula with l > {} is known to underestimate; see the handover_warning column",
            wlan_offload::formulas::HANDOVER_WARNING_L
        )]
    } else {
        Vec::new()
    }
}

fn clamp_warnings(t: &table::Table) -> Vec<String> {
    let Some(c) = t.column("clamped") else {
        return Vec::new();
    };
    if t.rows.iter().any(|r| r[c] == "true") {
        vec!["some probabilities were clamped to [0, 1]; see the clamped column".to_string()]
    } else {
        Vec::new()
    }
}

/// Runs a parsed command line and returns what it would print.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let exec = Exec::default();
    let modes = cli.mode.modes();
    let single = |t: table::Table| {
        let mut warnings = handover_warnings(&t);
        warnings.extend(clamp_warnings(&t));
        Output { text: t.to_csv(), warnings }
    };
    Ok(match &cli.command {
        Command::Stats { files, atom } => {
            if !(*atom > 0.0) {
                return Err(CliError::Usage("atom size must be positive".into()));
            }
            let inputs = files
                .iter()
                .map(|p| Ok((p.display().to_string(), read(p)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            let (disp, corr) = commands::stats_tables(&inputs, *atom)?;
            Output {
                text: format!("{}\n{}", disp.to_csv(), corr.to_csv()),
                warnings: Vec::new(),
            }
        }
        Command::Identify { file, atom, n0 } => {
            let (grid, part) =
                commands::identify(&read(file)?, &file.display().to_string(), *atom, *n0)?;
            Output {
                text: commands::partition_text(&grid, &part),
                warnings: Vec::new(),
            }
        }
        Command::Eval { scenario } => {
            single(commands::eval_table(&load_scenario(scenario, cli.seed)?, &modes)?)
        }
        Command::Simulate { scenario } => single(commands::simulate_table(
            &load_scenario(scenario, cli.seed)?,
            &modes,
            exec,
        )?),
        Command::Sweep { scenario, sweep } => {
            let s = load_scenario(scenario, cli.seed)?;
            let (key, values) = commands::parse_sweep(sweep)?;
            single(commands::sweep_table(&s, &key, &values, &modes, exec)?)
        }
        Command::Compare { scenario } => single(commands::compare_table(
            &load_scenario(scenario, cli.seed)?,
            &modes,
            exec,
        )?),
    })
}

/// Executes and writes the result to `--out` or stdout; warnings go to
/// stderr.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    apply_thread_limit()?;
    let out = execute(cli)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    match &cli.out {
        Some(path) => std::fs::write(path, out.text)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display()))),
        None => {
            print!("{}", out.text);
            Ok(())
        }
    }
}
