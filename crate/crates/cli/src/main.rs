use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use active_scalar::analysis::RegimeQuery;
use active_scalar::constitutive::ModeTag;
use active_scalar_cli::commands::{cmd_regime, cmd_simulate, cmd_sweep};
use active_scalar_cli::config::{from_table, set_key};
use active_scalar_cli::selftest;
use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use toml::Table;

/// Overrides `output.directory` for `simulate` and the default for `sweep`.
const OUTPUT_ENV: &str = "ACTIVE_SCALAR_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "active-scalar", version, about = "Stochastic fractional active scalar experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the ensemble described by a TOML config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Override a config entry, e.g. `--set time.dt=0.005`.
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Repeat the ensemble over values of one config entry.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_name = "SECTION.KEY")]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a parameter point against the known existence regimes.
    Regime {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        q: f64,
        /// Initial-data integrability; `inf` for L^∞.
        #[arg(long)]
        q0: f64,
        /// `ca`, `cb` or `cc`.
        #[arg(long, default_value = "ca")]
        mode: ModeTag,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in acceptance checks.
    Selftest {
        /// Comma-separated criterion ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

fn load_table(path: &Path, overrides: &[String]) -> Result<Table> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut table: Table = text.parse().with_context(|| format!("parsing {}", path.display()))?;
    for o in overrides {
        let (key, value) = o.split_once('=').with_context(|| format!("override '{o}' is not SECTION.KEY=VALUE"))?;
        set_key(&mut table, key.trim(), value.trim())?;
    }
    if let Ok(dir) = std::env::var(OUTPUT_ENV) {
        set_key(&mut table, "output.directory", &format!("{dir:?}"))?;
    }
    Ok(table)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate { config, overrides } => {
            let cfg = from_table(load_table(&config, &overrides)?)?;
            let out = cmd_simulate(&cfg)?;
            let r = &out.report;
            println!("wrote {} artifacts to {}", out.run.artifacts.len(), out.run.root.display());
            println!("m = {}, blow-up fraction = {}", r.m, r.blowup_fraction);
            if let Some(v) = r.mean_of(|s| s.sup_lq) {
                println!("E sup_t |θ|^q_Lq = {v:.6e} (q = {})", r.q);
            }
            if let Some(v) = r.mean_of(|s| s.int_h_beta_sq) {
                println!("E ∫ |θ|²_H^(β,q) dt = {v:.6e} (β = {})", r.beta);
            }
            Ok(true)
        }
        Command::Sweep { config, param, values, out } => {
            let table = load_table(&config, &[])?;
            let out = out
                .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("sweep"));
            let (run, points) = cmd_sweep(&table, &param, &values, &out)?;
            for p in &points {
                println!("{param} = {}: blow-up fraction {}, E sup|θ|^q = {:?}", p.value, p.blowup_fraction, p.e_sup_lq);
            }
            println!("wrote {}", run.root.join("sweep.csv").display());
            Ok(true)
        }
        Command::Regime { d, alpha, q, q0, mode, p, delta, json } => {
            let qr = RegimeQuery::new(d, alpha, mode, q, q0).with_p(p).with_delta(delta);
            let (_, text) = cmd_regime(&qr, json)?;
            print!("{text}");
            Ok(true)
        }
        Command::Selftest { only } => {
            let results = selftest::run_all(&only, |r| println!("{r}"));
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} passed, {failed} failed", results.len() - failed);
            Ok(failed == 0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
