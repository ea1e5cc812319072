//! Command-line front end. `run` parses arguments, executes one subcommand
//! and returns the process exit code: 0 on success, 1 on usage or config
//! errors, 2 when a loss bound cannot be met.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ConfigFile, ExperimentConfig, ModelKind};
use crate::efficiency::efficiency;
use crate::error::Result;
use crate::experiment::{self, SweepRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "crosslayer-ee", version, about = "Queue-aware energy-efficient power control")]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,

    #[command(subcommand)]
    pub command: Command,
}

/// Flags that override values from `--config`.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// TOML config with [system] [queue] [model] [sweep] [sim] sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub q: Option<f64>,
    #[arg(long = "K", global = true)]
    pub buffer_size: Option<usize>,
    #[arg(long, global = true)]
    pub b_dbm: Option<f64>,
    /// Fixed power as a multiple of the noise power.
    #[arg(long, global = true)]
    pub b_over_sigma2: Option<f64>,
    #[arg(long, global = true)]
    pub sigma2_dbm: Option<f64>,
    #[arg(long, global = true)]
    pub pmax_dbm: Option<f64>,
    #[arg(long, global = true)]
    pub pmin_dbm: Option<f64>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long = "R", global = true)]
    pub rate: Option<f64>,
    #[arg(long = "R0", global = true)]
    pub rate_ref: Option<f64>,
    #[arg(long, value_enum, global = true)]
    pub model: Option<ModelKind>,
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    #[arg(long, global = true)]
    pub hh: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// CSV destination; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AxisArgs {
    /// Sweep axis: q, K, b_over_sigma2, epsilon, p (dBm) or p_w.
    #[arg(long)]
    pub axis: Option<String>,
    /// Comma-separated axis values, in increasing order.
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// η, Φ and f at one transmit power.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        p_dbm: f64,
    },
    /// Unconstrained and constrained optimal power.
    Optimize {
        #[command(flatten)]
        axis: AxisArgs,
    },
    /// Efficiency curves over a power grid for each axis value.
    Sweep {
        #[command(flatten)]
        axis: AxisArgs,
    },
    /// Monte Carlo loss fraction versus packet count.
    Simulate {
        /// Per-slot success probability (overrides the model).
        #[arg(long)]
        f: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        p_dbm: Option<f64>,
        /// Comma-separated packet counts.
        #[arg(long, value_delimiter = ',')]
        packets: Option<Vec<u64>>,
        #[arg(long)]
        runs: Option<u64>,
    },
    /// Cross-layer power gain over the saturated-queue optimum.
    Gain {
        #[command(flatten)]
        axis: AxisArgs,
    },
    /// Optimal power share of P_max for the 20/30 dB SNR case study.
    Cases,
}

impl Overrides {
    fn apply(&self, file: &mut ConfigFile) {
        let sys = &mut file.system;
        if let Some(v) = self.rate {
            sys.rate = Some(v);
        }
        if let Some(v) = self.b_dbm {
            sys.b_dbm = Some(v);
            sys.b_w = None;
            sys.b_over_sigma2 = None;
        }
        if let Some(v) = self.b_over_sigma2 {
            sys.b_over_sigma2 = Some(v);
            sys.b_dbm = None;
            sys.b_w = None;
        }
        if let Some(v) = self.sigma2_dbm {
            sys.sigma2_dbm = Some(v);
            sys.sigma2_w = None;
        }
        if let Some(v) = self.pmax_dbm {
            sys.pmax_dbm = Some(v);
            sys.pmax_w = None;
        }
        if let Some(v) = self.pmin_dbm {
            sys.pmin_dbm = Some(v);
            sys.pmin_w = None;
        }
        if let Some(v) = self.epsilon {
            sys.epsilon = Some(v);
        }
        if let Some(v) = self.q {
            file.queue.q = Some(v);
        }
        if let Some(v) = self.buffer_size {
            file.queue.buffer_size = Some(v);
        }
        if let Some(v) = self.rate_ref {
            file.model.rate_ref = Some(v);
        }
        if let Some(v) = self.model {
            file.model.kind = Some(v);
        }
        if let Some(v) = self.kappa {
            file.model.kappa = Some(v);
        }
        if let Some(v) = self.hh {
            file.model.hh = Some(v);
        }
        if let Some(v) = self.seed {
            file.sim.seed = Some(v);
        }
    }
}

impl AxisArgs {
    fn apply(&self, file: &mut ConfigFile) {
        if let Some(axis) = &self.axis {
            file.sweep.axis = Some(axis.clone());
        }
        if let Some(values) = &self.values {
            file.sweep.values = Some(values.clone());
            file.sweep.start = None;
            file.sweep.stop = None;
            file.sweep.num = None;
        }
    }
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn execute(cli: &Cli) -> Result<i32> {
    let mut file = match &cli.overrides.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    cli.overrides.apply(&mut file);
    match &cli.command {
        Command::Optimize { axis } | Command::Sweep { axis } | Command::Gain { axis } => {
            axis.apply(&mut file)
        }
        Command::Simulate {
            f,
            p_dbm,
            packets,
            runs,
        } => {
            if f.is_some() {
                file.sim.f = *f;
            }
            if p_dbm.is_some() {
                file.sim.p_dbm = *p_dbm;
                file.sim.p_w = None;
            }
            if packets.is_some() {
                file.sim.packets = packets.clone();
            }
            if runs.is_some() {
                file.sim.runs = *runs;
            }
        }
        Command::Eval { .. } | Command::Cases => {}
    }
    let cfg = ExperimentConfig::resolve(&file)?;
    let out = open_out(&cli.overrides.out)?;

    match &cli.command {
        Command::Eval { p_dbm } => {
            let p = crate::units::dbm_to_watts(*p_dbm);
            let pt = efficiency(&cfg.system, &cfg.queue, &cfg.model, p)?;
            eprintln!(
                "p = {p} W ({p_dbm} dBm): eta = {} bit/J, phi = {}, f = {}, feasible = {}",
                pt.eta, pt.phi, pt.f, pt.feasible
            );
            let row = SweepRow {
                axis_value: p,
                p,
                eta: pt.eta,
                phi: pt.phi,
                f: pt.f,
                feasible: pt.feasible,
            };
            experiment::write_sweep_csv(out, &[row])?;
            Ok(EXIT_OK)
        }
        Command::Optimize { .. } => {
            let rows = experiment::optimize_rows(&cfg)?;
            experiment::write_optimize_csv(out, &rows)?;
            if experiment::any_infeasible(&rows) {
                eprintln!("loss bound epsilon cannot be met at p_max for at least one configuration");
                return Ok(EXIT_INFEASIBLE);
            }
            Ok(EXIT_OK)
        }
        Command::Sweep { .. } => {
            let rows = experiment::sweep_rows(&cfg)?;
            experiment::write_sweep_csv(out, &rows)?;
            Ok(EXIT_OK)
        }
        Command::Simulate { .. } => {
            let (phi, rows) = experiment::simulate_rows(&cfg)?;
            experiment::write_simulate_csv(out, phi, &rows)?;
            Ok(EXIT_OK)
        }
        Command::Gain { .. } => {
            let rows = experiment::gain_rows(&cfg)?;
            experiment::write_gain_csv(out, &rows)?;
            if rows.iter().any(|r| r.gain_db.is_none()) {
                eprintln!("loss bound epsilon cannot be met at p_max for at least one configuration");
                return Ok(EXIT_INFEASIBLE);
            }
            Ok(EXIT_OK)
        }
        Command::Cases => {
            let rows = experiment::snr_cases(cfg.queue.buffer_size())?;
            experiment::write_cases_csv(out, &rows)?;
            Ok(EXIT_OK)
        }
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    execute(&cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_CONFIG
    })
}
