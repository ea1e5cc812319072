//! Experiment configuration: a TOML file with `[system]`, `[queue]`,
//! `[model]`, `[sweep]` and `[sim]` sections, overlaid by command-line
//! flags.
//!
//! Powers are in dBm unless the key ends in `_w`. Defaults follow the
//! standard scenario: `K = 10`, `P_max = 35 dBm`, `R = 4000 bit/s`,
//! `R0 = 1000 bit/s`, `σ² = 0 dBm`, `b/σ² = 100` (20 dB), `ε = 1`.
//! `pmin_dbm` defaults to 10 dBm; the scenario's "P_min = 10 dB" can
//! also be read as 10 dB above the noise floor, which is
//! `pmin_dbm = sigma2_dbm + 10`.
//!
//! ```toml
//! [system]
//! R = 4000
//! sigma2_dbm = 0
//! b_over_sigma2 = 100
//! pmax_dbm = 35
//! epsilon = 0.01
//!
//! [queue]
//! q = 0.5
//! K = 10
//!
//! [model]
//! kind = "exp"
//! R0 = 1000
//!
//! [sweep]
//! axis = "q"
//! values = [0.1, 0.5, 1.0]
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::efficiency::SystemParams;
use crate::error::{Error, Result};
use crate::queue::QueueParams;
use crate::success::SuccessModel;
use crate::units::dbm_to_watts;

pub const DEFAULT_RATE: f64 = 4000.0;
pub const DEFAULT_RATE_REF: f64 = 1000.0;
pub const DEFAULT_BUFFER: usize = 10;
pub const DEFAULT_PMAX_DBM: f64 = 35.0;
pub const DEFAULT_PMIN_DBM: f64 = 10.0;
pub const DEFAULT_SIGMA2_DBM: f64 = 0.0;
pub const DEFAULT_B_OVER_SIGMA2: f64 = 100.0;
pub const DEFAULT_Q: f64 = 0.5;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub queue: QueueSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub sim: SimSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(rename = "R")]
    pub rate: Option<f64>,
    pub a: Option<f64>,
    pub b_dbm: Option<f64>,
    pub b_w: Option<f64>,
    pub b_over_sigma2: Option<f64>,
    pub sigma2_dbm: Option<f64>,
    pub sigma2_w: Option<f64>,
    pub pmax_dbm: Option<f64>,
    pub pmax_w: Option<f64>,
    pub pmin_dbm: Option<f64>,
    pub pmin_w: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueueSection {
    pub q: Option<f64>,
    #[serde(rename = "K")]
    pub buffer_size: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[default]
    Exp,
    Qfunc,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: Option<ModelKind>,
    #[serde(rename = "R0")]
    pub rate_ref: Option<f64>,
    pub kappa: Option<f64>,
    pub hh: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: Option<String>,
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub num: Option<usize>,
    /// `"linear"` (default) or `"log"` spacing between `start` and `stop`.
    pub scale: Option<String>,
    /// Power grid for curve sweeps, in dBm, evenly spaced.
    pub p_start_dbm: Option<f64>,
    pub p_stop_dbm: Option<f64>,
    pub p_num: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    /// Success probability per slot; derived from the model at `p_dbm` when
    /// absent.
    pub f: Option<f64>,
    pub p_dbm: Option<f64>,
    pub p_w: Option<f64>,
    pub packets: Option<Vec<u64>>,
    pub runs: Option<u64>,
    pub seed: Option<u64>,
    pub initial_state: Option<usize>,
    pub warmup_slots: Option<u64>,
}

impl ConfigFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

/// Parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Q,
    BufferSize,
    BOverSigma2,
    Epsilon,
    /// Transmit power in dBm.
    PowerDbm,
    /// Transmit power in watts.
    PowerW,
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "q" => Self::Q,
            "K" => Self::BufferSize,
            "b_over_sigma2" => Self::BOverSigma2,
            "epsilon" => Self::Epsilon,
            "p" | "p_dbm" => Self::PowerDbm,
            "p_w" => Self::PowerW,
            other => {
                return Err(Error::Config(format!(
                    "unknown sweep axis {other:?} (expected q, K, b_over_sigma2, epsilon, p, p_w)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    /// Power grid (watts) evaluated for each non-power axis value.
    pub powers: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    pub f: Option<f64>,
    pub p: Option<f64>,
    pub packets: Vec<u64>,
    pub runs: u64,
    pub seed: u64,
    pub initial_state: usize,
    pub warmup_slots: u64,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub system: SystemParams,
    pub queue: QueueParams,
    pub model: SuccessModel,
    pub model_kind: ModelKind,
    pub sweep: Option<SweepSpec>,
    pub sim: SimOptions,
}

fn pick_power(name: &str, dbm: Option<f64>, watts: Option<f64>) -> Result<Option<f64>> {
    match (dbm, watts) {
        (Some(_), Some(_)) => Err(Error::Config(format!(
            "both {name}_dbm and {name}_w given; use one"
        ))),
        (Some(d), None) => Ok(Some(dbm_to_watts(d))),
        (None, w) => Ok(w),
    }
}

pub fn linspace(start: f64, stop: f64, num: usize) -> Vec<f64> {
    match num {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..num)
            .map(|i| tidy(start + (stop - start) * i as f64 / (num - 1) as f64))
            .collect(),
    }
}

/// Rounds to 14 significant digits so grids like 0.1..1.0 print as typed.
fn tidy(x: f64) -> f64 {
    format!("{x:.13e}").parse().unwrap_or(x)
}

pub fn logspace(start: f64, stop: f64, num: usize) -> Vec<f64> {
    let mut out: Vec<f64> = linspace(start.ln(), stop.ln(), num)
        .into_iter()
        .map(f64::exp)
        .collect();
    // Keep the endpoints exact rather than exp(ln(x)).
    if let Some(first) = out.first_mut() {
        *first = start;
    }
    if num > 1 {
        out[num - 1] = stop;
    }
    out
}

fn sweep_values(s: &SweepSection) -> Result<Vec<f64>> {
    let values = match (&s.values, s.start, s.stop, s.num) {
        (Some(v), None, None, None) => v.clone(),
        (None, Some(start), Some(stop), Some(num)) => {
            if num == 0 || stop < start {
                return Err(Error::Config("sweep range must be nonempty with start <= stop".into()));
            }
            match s.scale.as_deref().unwrap_or("linear") {
                "linear" => linspace(start, stop, num),
                "log" if start > 0.0 => logspace(start, stop, num),
                "log" => return Err(Error::Config("log sweep needs start > 0".into())),
                other => return Err(Error::Config(format!("unknown sweep scale {other:?}"))),
            }
        }
        _ => {
            return Err(Error::Config(
                "sweep needs either `values` or all of `start`, `stop`, `num`".into(),
            ))
        }
    };
    if values.is_empty() {
        return Err(Error::Config("sweep values must be nonempty".into()));
    }
    if values.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("sweep values must be in increasing order".into()));
    }
    Ok(values)
}

impl ExperimentConfig {
    pub fn resolve(file: &ConfigFile) -> Result<Self> {
        let sys = &file.system;
        let rate = sys.rate.unwrap_or(DEFAULT_RATE);
        let sigma2 = pick_power("sigma2", sys.sigma2_dbm, sys.sigma2_w)?
            .unwrap_or_else(|| dbm_to_watts(DEFAULT_SIGMA2_DBM));
        let b = match (pick_power("b", sys.b_dbm, sys.b_w)?, sys.b_over_sigma2) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give b either as a power or as b_over_sigma2".into()))
            }
            (Some(b), None) => b,
            (None, Some(ratio)) => ratio * sigma2,
            (None, None) => DEFAULT_B_OVER_SIGMA2 * sigma2,
        };
        let p_max = pick_power("pmax", sys.pmax_dbm, sys.pmax_w)?
            .unwrap_or_else(|| dbm_to_watts(DEFAULT_PMAX_DBM));
        let p_min = pick_power("pmin", sys.pmin_dbm, sys.pmin_w)?
            .unwrap_or_else(|| dbm_to_watts(DEFAULT_PMIN_DBM));
        let system = SystemParams::new(rate, b, sigma2, p_min, p_max, sys.epsilon.unwrap_or(1.0))?
            .with_amp_coeff(sys.a.unwrap_or(1.0))?;

        let queue = QueueParams::new(
            file.queue.q.unwrap_or(DEFAULT_Q),
            file.queue.buffer_size.unwrap_or(DEFAULT_BUFFER),
        )?;

        let m = &file.model;
        let model_kind = m.kind.unwrap_or_default();
        let rate_ref = m.rate_ref.unwrap_or(DEFAULT_RATE_REF);
        let model = match model_kind {
            ModelKind::Exp => {
                if m.kappa.is_some() || m.hh.is_some() {
                    return Err(Error::Config("kappa/hh only apply to the qfunc model".into()));
                }
                SuccessModel::exp_unknown_channel(rate, rate_ref, sigma2)?
            }
            ModelKind::Qfunc => {
                let kappa = m
                    .kappa
                    .ok_or_else(|| Error::Config("qfunc model needs kappa".into()))?;
                SuccessModel::q_known_channel(rate, rate_ref, kappa, m.hh.unwrap_or(1.0), sigma2)?
            }
        };

        let sweep = match &file.sweep.axis {
            None => None,
            Some(axis) => {
                let axis: Axis = axis.parse()?;
                let values = sweep_values(&file.sweep)?;
                let p_start = file
                    .sweep
                    .p_start_dbm
                    .unwrap_or_else(|| crate::units::watts_to_dbm(p_min) - 10.0);
                let p_stop = file
                    .sweep
                    .p_stop_dbm
                    .unwrap_or_else(|| crate::units::watts_to_dbm(p_max));
                let p_num = file.sweep.p_num.unwrap_or(201);
                if p_num == 0 || p_stop < p_start {
                    return Err(Error::Config("power grid must be nonempty and ordered".into()));
                }
                let powers = linspace(p_start, p_stop, p_num).into_iter().map(dbm_to_watts).collect();
                Some(SweepSpec { axis, values, powers })
            }
        };

        let s = &file.sim;
        let sim = SimOptions {
            f: s.f,
            p: pick_power("p", s.p_dbm, s.p_w)?,
            packets: s.packets.clone().unwrap_or_else(|| vec![1000]),
            runs: s.runs.unwrap_or(10_000),
            seed: s.seed.unwrap_or(0),
            initial_state: s.initial_state.unwrap_or(0),
            warmup_slots: s.warmup_slots.unwrap_or(0),
        };
        if sim.packets.is_empty() || sim.packets.contains(&0) {
            return Err(Error::Config("sim packets must be a nonempty list of positive counts".into()));
        }

        Ok(Self {
            system,
            queue,
            model,
            model_kind,
            sweep,
            sim,
        })
    }

    /// Parameters with one axis set to `value`. Power axes leave the
    /// parameters unchanged.
    pub fn at_axis(&self, axis: Axis, value: f64) -> Result<(SystemParams, QueueParams, SuccessModel)> {
        let mut sys = self.system;
        let mut queue = self.queue;
        match axis {
            Axis::Q => queue = queue.with_arrival_prob(value)?,
            Axis::BufferSize => {
                if value.fract() != 0.0 || value < 1.0 {
                    return Err(Error::Config(format!("K must be a positive integer, got {value}")));
                }
                queue = QueueParams::new(queue.arrival_prob(), value as usize)?;
            }
            Axis::BOverSigma2 => sys.fixed_power_b = value * sys.noise_sigma2,
            Axis::Epsilon => sys.loss_bound_epsilon = value,
            Axis::PowerDbm | Axis::PowerW => {}
        }
        sys.validate()?;
        Ok((sys, queue, self.model))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn defaults_match_standard_scenario() {
        let cfg = ExperimentConfig::resolve(&ConfigFile::default()).unwrap();
        assert_eq!(cfg.queue.buffer_size(), 10);
        assert_relative_eq!(cfg.system.p_max, dbm_to_watts(35.0));
        assert_relative_eq!(cfg.system.noise_sigma2, 1e-3, max_relative = 1e-15);
        assert_relative_eq!(cfg.system.fixed_power_b, 0.1, max_relative = 1e-14);
        assert_eq!(cfg.model.exp_constant().map(|c| (c / 1e-3).round()), Some(15.0));
        assert!(cfg.sweep.is_none());
    }

    #[test]
    fn parses_sections() {
        let text = r#"
            [system]
            R = 256000
            b_w = 2.0
            sigma2_w = 0.01
            pmax_w = 5.0
            pmin_w = 0.001
            epsilon = 0.1

            [queue]
            q = 0.04
            K = 20

            [model]
            kind = "qfunc"
            R0 = 64000
            kappa = 1.5

            [sweep]
            axis = "q"
            start = 0.1
            stop = 1.0
            num = 10

            [sim]
            f = 0.5
            packets = [100, 1000]
            runs = 50
            seed = 9
        "#;
        let cfg = ExperimentConfig::resolve(&ConfigFile::from_toml(text).unwrap()).unwrap();
        assert_eq!(cfg.system.rate, 256_000.0);
        assert_eq!(cfg.system.fixed_power_b, 2.0);
        assert_eq!(cfg.queue.buffer_size(), 20);
        assert_eq!(cfg.model_kind, ModelKind::Qfunc);
        let sweep = cfg.sweep.unwrap();
        assert_eq!(sweep.axis, Axis::Q);
        assert_eq!(sweep.values.len(), 10);
        assert_relative_eq!(sweep.values[9], 1.0);
        assert_eq!(cfg.sim.packets, vec![100, 1000]);
        assert_eq!(cfg.sim.seed, 9);
    }

    #[test]
    fn config_errors() {
        for bad in [
            "[system]\nbogus = 1",
            "[system]\nb_w = 1\nb_dbm = 30",
            "[system]\nb_w = 1\nb_over_sigma2 = 10",
            "[model]\nkind = \"qfunc\"",
            "[model]\nkind = \"other\"",
            "[sweep]\naxis = \"z\"\nvalues = [1]",
            "[sweep]\naxis = \"q\"\nvalues = [0.5, 0.2]",
            "[sweep]\naxis = \"q\"\nvalues = []",
            "[sweep]\naxis = \"q\"",
            "[queue]\nq = 0",
            "[system]\nepsilon = 2",
            "not toml at all [",
        ] {
            let parsed = ConfigFile::from_toml(bad).and_then(|f| ExperimentConfig::resolve(&f));
            assert!(parsed.is_err(), "accepted: {bad}");
        }
    }

    #[test]
    fn axis_substitution() {
        let cfg = ExperimentConfig::resolve(&ConfigFile::default()).unwrap();
        let (sys, _, _) = cfg.at_axis(Axis::BOverSigma2, 10.0).unwrap();
        assert_relative_eq!(sys.fixed_power_b, 10.0 * sys.noise_sigma2);
        let (_, queue, _) = cfg.at_axis(Axis::Q, 0.25).unwrap();
        assert_eq!(queue.arrival_prob(), 0.25);
        assert!(cfg.at_axis(Axis::BufferSize, 2.5).is_err());
        assert!(cfg.at_axis(Axis::Q, 0.0).is_err());
    }
}
