//! Experiment runners behind the CLI: efficiency curves, optimum tables,
//! cross-layer gain curves, Monte Carlo convergence tables and the SNR
//! case study. Each produces rows in axis order and can be written as CSV
//! with a frozen column layout.

use std::io::Write;

use rayon::prelude::*;

use crate::config::{Axis, ExperimentConfig};
use crate::efficiency::{efficiency, power_gain_db, SystemParams};
use crate::error::{Error, Result};
use crate::optimizer::{maximize_constrained, Binding, Optimum};
use crate::queue::QueueParams;
use crate::sim::{convergence_study, ConvergenceRow, SimConfig};
use crate::success::SuccessModel;
use crate::units::{db_to_ratio, dbm_to_watts};

pub const SWEEP_HEADER: [&str; 6] = ["axis_value", "p", "eta", "phi", "f", "feasible"];
pub const OPTIMIZE_HEADER: [&str; 10] = [
    "q",
    "K",
    "b",
    "sigma2",
    "epsilon",
    "p_star",
    "p0",
    "p_star_constrained",
    "eta_star",
    "binding",
];
pub const GAIN_HEADER: [&str; 4] = ["axis_value", "p_star_q1", "p_star", "gain_db"];
pub const SIMULATE_HEADER: [&str; 5] =
    ["packet_count", "mean_loss", "std_error", "theoretical_phi", "relative_gap"];
pub const CASES_HEADER: [&str; 7] =
    ["q", "snr_db", "R", "R0", "b_over_sigma2", "p_star", "percent_of_pmax"];

/// Header comment for the case-study CSV.
pub const CASES_ASSUMPTION: &str = "# assumption: P_max = 35 dBm; idle draw is 50% of full load, so b = a*P_max; sigma2 = P_max / SNR; percent_of_pmax = 100 * p_star / P_max";

const INFEASIBLE: &str = "infeasible";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub p: f64,
    pub eta: f64,
    pub phi: f64,
    pub f: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeRow {
    pub q: f64,
    pub buffer_size: usize,
    pub b: f64,
    pub sigma2: f64,
    pub epsilon: f64,
    pub optimum: Optimum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainRow {
    pub axis_value: f64,
    pub p_star_q1: Option<f64>,
    pub p_star: Option<f64>,
    pub gain_db: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrCase {
    pub q: f64,
    pub snr_db: f64,
    pub rate: f64,
    pub rate_ref: f64,
    pub b_over_sigma2: f64,
    pub p_star: f64,
    pub percent_of_pmax: f64,
}

fn sweep_spec(cfg: &ExperimentConfig) -> Result<&crate::config::SweepSpec> {
    cfg.sweep
        .as_ref()
        .ok_or_else(|| Error::Config("this command needs a [sweep] axis".into()))
}

/// `η` over the power grid for each axis value; a power axis gives a
/// single curve over its own values.
pub fn sweep_rows(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let spec = sweep_spec(cfg)?;
    let points: Vec<(f64, f64)> = match spec.axis {
        Axis::PowerDbm => spec.values.iter().map(|&v| (v, dbm_to_watts(v))).collect(),
        Axis::PowerW => spec.values.iter().map(|&v| (v, v)).collect(),
        _ => spec
            .values
            .iter()
            .flat_map(|&v| spec.powers.iter().map(move |&p| (v, p)))
            .collect(),
    };
    points
        .par_iter()
        .map(|&(axis_value, p)| {
            let (sys, queue, model) = cfg.at_axis(spec.axis, axis_value)?;
            let pt = efficiency(&sys, &queue, &model, p)?;
            Ok(SweepRow {
                axis_value,
                p,
                eta: pt.eta,
                phi: pt.phi,
                f: pt.f,
                feasible: pt.feasible,
            })
        })
        .collect()
}

fn optimize_row(sys: &SystemParams, queue: &QueueParams, model: &SuccessModel) -> Result<OptimizeRow> {
    Ok(OptimizeRow {
        q: queue.arrival_prob(),
        buffer_size: queue.buffer_size(),
        b: sys.fixed_power_b,
        sigma2: sys.noise_sigma2,
        epsilon: sys.loss_bound_epsilon,
        optimum: maximize_constrained(sys, queue, model)?,
    })
}

/// Constrained optimum for each sweep value, or for the base parameters
/// when no sweep is configured.
pub fn optimize_rows(cfg: &ExperimentConfig) -> Result<Vec<OptimizeRow>> {
    match &cfg.sweep {
        None => Ok(vec![optimize_row(&cfg.system, &cfg.queue, &cfg.model)?]),
        Some(spec) => spec
            .values
            .par_iter()
            .map(|&v| {
                let (sys, queue, model) = cfg.at_axis(spec.axis, v)?;
                optimize_row(&sys, &queue, &model)
            })
            .collect(),
    }
}

/// Gain of the queue-aware constrained optimum over the `q = 1` optimum
/// for each value of a `q` or `b_over_sigma2` axis.
pub fn gain_rows(cfg: &ExperimentConfig) -> Result<Vec<GainRow>> {
    let spec = sweep_spec(cfg)?;
    if !matches!(spec.axis, Axis::Q | Axis::BOverSigma2 | Axis::BufferSize | Axis::Epsilon) {
        return Err(Error::Config("gain needs a q, K, b_over_sigma2 or epsilon axis".into()));
    }
    spec.values
        .par_iter()
        .map(|&v| {
            let (sys, queue, model) = cfg.at_axis(spec.axis, v)?;
            let saturated = queue.with_arrival_prob(1.0)?;
            let p_star_q1 = maximize_constrained(&sys, &saturated, &model)?.p_star_constrained;
            let p_star = maximize_constrained(&sys, &queue, &model)?.p_star_constrained;
            let gain_db = match (p_star_q1, p_star) {
                (Some(a), Some(b)) => Some(power_gain_db(a, b)?),
                _ => None,
            };
            Ok(GainRow {
                axis_value: v,
                p_star_q1,
                p_star,
                gain_db,
            })
        })
        .collect()
}

/// Success probability used by the simulator: explicit `f`, else the model
/// evaluated at the configured power.
pub fn sim_success_prob(cfg: &ExperimentConfig) -> Result<f64> {
    match (cfg.sim.f, cfg.sim.p) {
        (Some(f), _) => Ok(f),
        (None, Some(p)) => cfg.model.success_probability(p),
        (None, None) => Err(Error::Config(
            "simulate needs [sim] f, or a power via p_dbm / p_w".into(),
        )),
    }
}

pub fn sim_config(cfg: &ExperimentConfig) -> Result<SimConfig> {
    let mut sim = SimConfig::new(
        cfg.queue,
        sim_success_prob(cfg)?,
        cfg.sim.packets[0],
        cfg.sim.runs,
        cfg.sim.seed,
    );
    sim.initial_state = cfg.sim.initial_state;
    sim.warmup_slots = cfg.sim.warmup_slots;
    sim.validate()?;
    Ok(sim)
}

pub fn simulate_rows(cfg: &ExperimentConfig) -> Result<(f64, Vec<ConvergenceRow>)> {
    let sim = sim_config(cfg)?;
    let phi = cfg.queue.packet_loss(sim.success_prob)?;
    Ok((phi, convergence_study(&sim, &cfg.sim.packets)?))
}

/// Optimal power as a share of `P_max` for a link at a given SNR, with the
/// device drawing half its full-load power when idle.
pub fn snr_case(q: f64, snr_db: f64, rate: f64, rate_ref: f64, buffer_size: usize) -> Result<SnrCase> {
    let p_max = dbm_to_watts(crate::config::DEFAULT_PMAX_DBM);
    let sigma2 = p_max / db_to_ratio(snr_db);
    // b = 0.5 (b + a P_max) with a = 1.
    let b = p_max;
    let sys = SystemParams::new(rate, b, sigma2, sigma2 * 1e-3, p_max, 1.0)?;
    let queue = QueueParams::new(q, buffer_size)?;
    let model = SuccessModel::exp_unknown_channel(rate, rate_ref, sigma2)?;
    let p_star = crate::optimizer::maximize_unconstrained(&sys, &queue, &model)?.argmax;
    Ok(SnrCase {
        q,
        snr_db,
        rate,
        rate_ref,
        b_over_sigma2: b / sigma2,
        p_star,
        percent_of_pmax: 100.0 * p_star / p_max,
    })
}

/// The four case-study links: `q ∈ {0.5, 1/25}` at 20 and 30 dB SNR with
/// `R = 256 kbit/s`, `R0 = 64 kbit/s`.
pub fn snr_cases(buffer_size: usize) -> Result<Vec<SnrCase>> {
    let mut out = Vec::new();
    for q in [0.5, 1.0 / 25.0] {
        for snr in [30.0, 20.0] {
            out.push(snr_case(q, snr, 256_000.0, 64_000.0, buffer_size)?);
        }
    }
    Ok(out)
}

fn opt_str(v: Option<f64>) -> String {
    v.map_or_else(|| INFEASIBLE.to_string(), |x| x.to_string())
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(out)
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(SWEEP_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.axis_value.to_string(),
            r.p.to_string(),
            r.eta.to_string(),
            r.phi.to_string(),
            r.f.to_string(),
            r.feasible.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_optimize_csv<W: Write>(out: W, rows: &[OptimizeRow]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(OPTIMIZE_HEADER).map_err(csv_err)?;
    for r in rows {
        let o = &r.optimum;
        w.write_record([
            r.q.to_string(),
            r.buffer_size.to_string(),
            r.b.to_string(),
            r.sigma2.to_string(),
            r.epsilon.to_string(),
            o.p_star.to_string(),
            opt_str(o.p0),
            opt_str(o.p_star_constrained),
            o.eta_star.to_string(),
            o.binding.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_gain_csv<W: Write>(out: W, rows: &[GainRow]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(GAIN_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.axis_value.to_string(),
            opt_str(r.p_star_q1),
            opt_str(r.p_star),
            opt_str(r.gain_db),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_simulate_csv<W: Write>(out: W, phi: f64, rows: &[ConvergenceRow]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(SIMULATE_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.packet_count.to_string(),
            r.mean_loss.to_string(),
            r.std_error.to_string(),
            phi.to_string(),
            r.relative_gap.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_cases_csv<W: Write>(mut out: W, rows: &[SnrCase]) -> Result<()> {
    writeln!(out, "{CASES_ASSUMPTION}")?;
    let mut w = csv_writer(out);
    w.write_record(CASES_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.q.to_string(),
            r.snr_db.to_string(),
            r.rate.to_string(),
            r.rate_ref.to_string(),
            r.b_over_sigma2.to_string(),
            r.p_star.to_string(),
            r.percent_of_pmax.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// True when any optimum in the table is infeasible.
pub fn any_infeasible(rows: &[OptimizeRow]) -> bool {
    rows.iter().any(|r| r.optimum.binding == Binding::Infeasible)
}
