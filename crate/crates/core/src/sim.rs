//! Slotted Monte Carlo simulation of the transmit buffer.
//!
//! Per slot a packet arrives with probability `q` and the head-of-line
//! packet (including one that arrived this slot into an empty buffer) is
//! delivered with probability `f`, independently. An arrival that finds the
//! buffer full is lost exactly when the delivery in the same slot fails.
//! Runs are independent ChaCha8 streams: the run index selects the stream of
//! a generator keyed by the seed, so results do not depend on scheduling.

use rand::distr::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check, check_probability, Result};
use crate::queue::{compensated_sum, QueueParams};

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub queue: QueueParams,
    pub success_prob: f64,
    /// Arrivals observed per run.
    pub total_packets: u64,
    pub num_runs: u64,
    pub seed: u64,
    pub initial_state: usize,
    /// Slots simulated before counting starts.
    pub warmup_slots: u64,
    pub keep_per_run: bool,
    pub track_occupancy: bool,
}

impl SimConfig {
    pub fn new(queue: QueueParams, success_prob: f64, total_packets: u64, num_runs: u64, seed: u64) -> Self {
        Self {
            queue,
            success_prob,
            total_packets,
            num_runs,
            seed,
            initial_state: 0,
            warmup_slots: 0,
            keep_per_run: false,
            track_occupancy: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("success probability f", self.success_prob)?;
        check(self.total_packets >= 1, "total_packets", self.total_packets as f64, ">= 1")?;
        check(self.num_runs >= 1, "num_runs", self.num_runs as f64, ">= 1")?;
        check(
            self.initial_state <= self.queue.buffer_size(),
            "initial queue state",
            self.initial_state as f64,
            "a state in 0..=K",
        )
    }
}

/// Mean and standard error of the per-run fraction of slots spent in each
/// buffer state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupancyStats {
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub mean_loss_fraction: f64,
    pub std_error: f64,
    pub theoretical_phi: f64,
    /// `|mean - Φ| / Φ`; `0` when both vanish, `+∞` when only `Φ` does.
    pub relative_gap: f64,
    pub per_run_losses: Option<Vec<f64>>,
    pub occupancy: Option<OccupancyStats>,
}

struct RunOutcome {
    loss_fraction: f64,
    occupancy: Option<Vec<f64>>,
}

fn run_once(cfg: &SimConfig, run: u64, arrival: Bernoulli, success: Bernoulli) -> RunOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(run);
    let cap = cfg.queue.buffer_size();
    let mut state = cfg.initial_state;

    let mut step = |state: &mut usize| -> (bool, bool) {
        let arrived = arrival.sample(&mut rng);
        let delivered = (*state > 0 || arrived) && success.sample(&mut rng);
        let mut lost = false;
        if arrived {
            if *state < cap {
                *state += 1;
            } else if !delivered {
                lost = true;
            } else {
                // Head-of-line leaves and the arrival takes its slot.
                return (true, false);
            }
        }
        if delivered {
            *state -= 1;
        }
        (arrived, lost)
    };

    for _ in 0..cfg.warmup_slots {
        step(&mut state);
    }

    let mut counts = cfg.track_occupancy.then(|| vec![0u64; cap + 1]);
    let (mut arrivals, mut losses, mut slots) = (0u64, 0u64, 0u64);
    while arrivals < cfg.total_packets {
        if let Some(c) = counts.as_mut() {
            c[state] += 1;
        }
        let (arrived, lost) = step(&mut state);
        arrivals += arrived as u64;
        losses += lost as u64;
        slots += 1;
    }
    RunOutcome {
        loss_fraction: losses as f64 / arrivals as f64,
        occupancy: counts.map(|c| c.into_iter().map(|n| n as f64 / slots as f64).collect()),
    }
}

fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn simulate(cfg: &SimConfig) -> Result<SimReport> {
    cfg.validate()?;
    let arrival = Bernoulli::new(cfg.queue.arrival_prob()).expect("validated probability");
    let success = Bernoulli::new(cfg.success_prob).expect("validated probability");
    let outcomes: Vec<RunOutcome> = (0..cfg.num_runs)
        .into_par_iter()
        .map(|run| run_once(cfg, run, arrival, success))
        .collect();

    let losses: Vec<f64> = outcomes.iter().map(|o| o.loss_fraction).collect();
    let (mean, se) = mean_and_std_error(&losses);
    let occupancy = cfg.track_occupancy.then(|| {
        let states = cfg.queue.buffer_size() + 1;
        let (mean, std_error) = (0..states)
            .map(|s| {
                let per_run: Vec<f64> = outcomes
                    .iter()
                    .map(|o| o.occupancy.as_ref().expect("tracked")[s])
                    .collect();
                mean_and_std_error(&per_run)
            })
            .unzip();
        OccupancyStats { mean, std_error }
    });

    let phi = cfg.queue.packet_loss(cfg.success_prob)?;
    let relative_gap = if phi > 0.0 {
        (mean - phi).abs() / phi
    } else if mean == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(SimReport {
        mean_loss_fraction: mean,
        std_error: se,
        theoretical_phi: phi,
        relative_gap,
        per_run_losses: cfg.keep_per_run.then_some(losses),
        occupancy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub packet_count: u64,
    pub mean_loss: f64,
    pub std_error: f64,
    pub relative_gap: f64,
}

/// Runs [`simulate`] once per packet count, with the rest of `cfg` fixed.
pub fn convergence_study(cfg: &SimConfig, packet_counts: &[u64]) -> Result<Vec<ConvergenceRow>> {
    check(!packet_counts.is_empty(), "packet count list length", 0.0, "nonempty")?;
    packet_counts
        .iter()
        .map(|&n| {
            let report = simulate(&SimConfig {
                total_packets: n,
                keep_per_run: false,
                ..cfg.clone()
            })?;
            Ok(ConvergenceRow {
                packet_count: n,
                mean_loss: report.mean_loss_fraction,
                std_error: report.std_error,
                relative_gap: report.relative_gap,
            })
        })
        .collect()
}
