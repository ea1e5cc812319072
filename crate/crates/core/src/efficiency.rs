//! Queue-aware energy efficiency `η(p)`: delivered bits per joule of total
//! device energy, where the device draws `a·p + b` watts while transmitting
//! and `b` watts while idle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check, Result};
use crate::queue::QueueParams;
use crate::success::SuccessModel;

/// Success probabilities below this are treated as zero (`η = 0`).
const F_UNDERFLOW: f64 = 1e-300;

/// Relative step for central differences of `Φ(p)`.
const FD_REL_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Transmission rate `R` in bits/s.
    pub rate: f64,
    /// Power drawn regardless of transmission, watts.
    pub fixed_power_b: f64,
    /// Multiplier on radiated power in the device power model.
    pub amp_coeff_a: f64,
    pub noise_sigma2: f64,
    pub p_min: f64,
    pub p_max: f64,
    /// Upper bound on the packet-loss fraction.
    pub loss_bound_epsilon: f64,
}

impl SystemParams {
    pub fn new(
        rate: f64,
        fixed_power_b: f64,
        noise_sigma2: f64,
        p_min: f64,
        p_max: f64,
        loss_bound_epsilon: f64,
    ) -> Result<Self> {
        let sys = Self {
            rate,
            fixed_power_b,
            amp_coeff_a: 1.0,
            noise_sigma2,
            p_min,
            p_max,
            loss_bound_epsilon,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn with_amp_coeff(mut self, a: f64) -> Result<Self> {
        self.amp_coeff_a = a;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check(self.rate > 0.0 && self.rate.is_finite(), "rate R", self.rate, "R > 0")?;
        check(
            self.fixed_power_b >= 0.0 && self.fixed_power_b.is_finite(),
            "fixed power b",
            self.fixed_power_b,
            "b >= 0",
        )?;
        check(
            self.amp_coeff_a > 0.0 && self.amp_coeff_a.is_finite(),
            "amplifier coefficient a",
            self.amp_coeff_a,
            "a > 0",
        )?;
        check(
            self.noise_sigma2 > 0.0 && self.noise_sigma2.is_finite(),
            "noise power",
            self.noise_sigma2,
            "sigma2 > 0",
        )?;
        check(self.p_min > 0.0, "p_min", self.p_min, "p_min > 0")?;
        check(
            self.p_max > self.p_min && self.p_max.is_finite(),
            "p_max",
            self.p_max,
            "finite p_max > p_min",
        )?;
        check(
            self.loss_bound_epsilon > 0.0 && self.loss_bound_epsilon <= 1.0,
            "loss bound epsilon",
            self.loss_bound_epsilon,
            "0 < epsilon <= 1",
        )
    }
}

/// `η` and the quantities it was built from, at one transmit power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyPoint {
    pub power_p: f64,
    /// Bits per joule.
    pub eta: f64,
    pub phi: f64,
    pub f: f64,
    /// `Φ ≤ ε` and `p_min ≤ p ≤ p_max`.
    pub feasible: bool,
}

pub fn efficiency(
    sys: &SystemParams,
    queue: &QueueParams,
    model: &SuccessModel,
    p: f64,
) -> Result<EfficiencyPoint> {
    check(p > 0.0, "transmit power", p, "p > 0")?;
    let f = model.success_probability(p)?;
    efficiency_with_success(sys, queue, p, f)
}

/// `η` for a known success probability `f` at power `p`.
pub fn efficiency_with_success(
    sys: &SystemParams,
    queue: &QueueParams,
    p: f64,
    f: f64,
) -> Result<EfficiencyPoint> {
    check(p > 0.0, "transmit power", p, "p > 0")?;
    let phi = queue.packet_loss(f)?;
    let q = queue.arrival_prob();
    let eta = if f < F_UNDERFLOW {
        0.0
    } else {
        let delivered = q * queue.delivery_prob(f)?;
        delivered * sys.rate / (sys.fixed_power_b + sys.amp_coeff_a * p * delivered / f)
    };
    Ok(EfficiencyPoint {
        power_p: p,
        eta,
        phi,
        f,
        feasible: phi <= sys.loss_bound_epsilon && p >= sys.p_min && p <= sys.p_max,
    })
}

/// Evaluates `η` at each power, in parallel; output order follows `powers`.
pub fn efficiency_curve(
    sys: &SystemParams,
    queue: &QueueParams,
    model: &SuccessModel,
    powers: &[f64],
) -> Result<Vec<EfficiencyPoint>> {
    powers
        .par_iter()
        .map(|&p| efficiency(sys, queue, model, p))
        .collect()
}

/// Packet loss as a function of power, `Φ(f(p))`.
pub fn loss_at_power(queue: &QueueParams, model: &SuccessModel, p: f64) -> Result<f64> {
    queue.packet_loss(model.success_probability(p)?)
}

/// Stationarity of `η` at a given power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityResidual {
    /// `-Φ'·D - (1-Φ)·D'`, with `D` the average consumed power. Has the sign
    /// of `dη/dp` and vanishes at the maximizer.
    pub residual: f64,
    /// Sum of the magnitudes of the additive terms making up `residual`.
    pub scale: f64,
    /// Residual of the reduced condition
    /// `-Φ'(b + pq(1-Φ)/f) + (1-Φ)(Φ' p/f + (p/f)') = 0`, which leaves the
    /// `q` and `(1-Φ)` weights off the radiated-power term. It agrees with
    /// `residual` about where the root is only when `b = 0, q = 1`;
    /// reported for comparison.
    pub reduced: f64,
}

impl StationarityResidual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.residual / self.scale
        }
    }
}

/// First-order optimality residual of `η` at `p`, with `dΦ/dp` from central
/// differences of [`loss_at_power`].
pub fn stationarity_residual(
    sys: &SystemParams,
    queue: &QueueParams,
    model: &SuccessModel,
    p: f64,
) -> Result<StationarityResidual> {
    check(p > 0.0, "transmit power", p, "p > 0")?;
    let h = FD_REL_STEP * p;
    let d_phi = (loss_at_power(queue, model, p + h)? - loss_at_power(queue, model, p - h)?)
        / (2.0 * h);
    let f = model.success_probability(p)?;
    let df = model.success_derivative(p)?;
    let delivered = queue.delivery_prob(f)?;
    let q = queue.arrival_prob();
    let a = sys.amp_coeff_a;
    let b = sys.fixed_power_b;

    let p_over_f = p / f;
    let d_p_over_f = (f - p * df) / (f * f);
    let consumed = b + a * p * q * delivered / f;
    let weight = delivered * a * q;

    // (1-Φ)·D' split into its additive parts so `scale` does not vanish
    // where d(p/f)/dp does.
    let terms = [
        -d_phi * consumed,
        -weight * delivered / f,
        weight * delivered * p * df / (f * f),
        weight * d_phi * p_over_f,
    ];
    let reduced = -d_phi * (b + p * q * delivered / f)
        + delivered * (d_phi * p_over_f + d_p_over_f);

    Ok(StationarityResidual {
        residual: terms.iter().sum(),
        scale: terms.iter().map(|t| t.abs()).sum(),
        reduced,
    })
}

/// Transmit-power saving `10 log10(p_q1 / p)` in dB of the queue-aware
/// optimum `p` over the always-backlogged optimum `p_q1`.
pub fn power_gain_db(p_star_q1: f64, p_star: f64) -> Result<f64> {
    check(p_star_q1 > 0.0, "reference power", p_star_q1, "> 0")?;
    check(p_star > 0.0, "optimal power", p_star, "> 0")?;
    Ok(10.0 * (p_star_q1 / p_star).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sys(b: f64) -> SystemParams {
        SystemParams::new(4000.0, b, 1.0, 1e-3, 1e3, 1.0).unwrap()
    }

    #[test]
    fn rejects_bad_system_params() {
        assert!(SystemParams::new(0.0, 1.0, 1.0, 0.1, 1.0, 0.1).is_err());
        assert!(SystemParams::new(1.0, -1.0, 1.0, 0.1, 1.0, 0.1).is_err());
        assert!(SystemParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 0.1).is_err());
        assert!(SystemParams::new(1.0, 1.0, 1.0, 0.1, 1.0, 0.0).is_err());
        assert!(sys(1.0).with_amp_coeff(0.0).is_err());
    }

    #[test]
    fn zero_fixed_power_reduces_to_rate_times_f_over_p() {
        for &(q, k) in &[(0.1, 1), (0.5, 10), (1.0, 3)] {
            let queue = QueueParams::new(q, k).unwrap();
            let pt = efficiency_with_success(&sys(0.0), &queue, 2.0, 0.5).unwrap();
            assert_relative_eq!(pt.eta, 1000.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn always_backlogged_reduction() {
        let queue = QueueParams::new(1.0, 10).unwrap();
        let pt = efficiency_with_success(&sys(1.0), &queue, 1.0, 0.8607).unwrap();
        assert_relative_eq!(pt.eta, 1721.4, max_relative = 1e-12);
        assert_relative_eq!(pt.phi, 1.0 - 0.8607, max_relative = 1e-12);
    }

    #[test]
    fn vanishes_at_both_ends() {
        let model = SuccessModel::exp_unknown_channel(4000.0, 1000.0, 1.0).unwrap();
        let queue = QueueParams::new(0.5, 10).unwrap();
        let s = sys(10.0);
        assert_eq!(efficiency(&s, &queue, &model, 1e-3).unwrap().eta, 0.0);
        assert!(efficiency(&s, &queue, &model, 1e12).unwrap().eta < 1e-6);
        assert!(efficiency(&s, &queue, &model, 0.0).is_err());
    }

    #[test]
    fn feasibility_flag() {
        let model = SuccessModel::exp_unknown_channel(4000.0, 1000.0, 1.0).unwrap();
        let queue = QueueParams::new(1.0, 10).unwrap();
        let s = SystemParams::new(4000.0, 1.0, 1.0, 1.0, 100.0, 0.5).unwrap();
        // Φ = 1 - f here; f(15) = 1/e so Φ ≈ 0.63 > 0.5.
        assert!(!efficiency(&s, &queue, &model, 15.0).unwrap().feasible);
        assert!(efficiency(&s, &queue, &model, 50.0).unwrap().feasible);
        assert!(!efficiency(&s, &queue, &model, 200.0).unwrap().feasible);
    }

    #[test]
    fn residual_vanishes_at_analytic_stationary_point() {
        // b = 0, q = 1: η ∝ f/p, maximized at p = c = 15.
        let model = SuccessModel::exp_unknown_channel(4000.0, 1000.0, 1.0).unwrap();
        let queue = QueueParams::new(1.0, 10).unwrap();
        let r = stationarity_residual(&sys(0.0), &queue, &model, 15.0).unwrap();
        assert!(r.relative().abs() < 1e-8, "{r:?}");
        assert!(r.reduced.abs() < 1e-8, "{r:?}");
        let left = stationarity_residual(&sys(0.0), &queue, &model, 10.0).unwrap();
        let right = stationarity_residual(&sys(0.0), &queue, &model, 20.0).unwrap();
        assert!(left.residual > 0.0 && right.residual < 0.0);
    }

    #[test]
    fn gain_examples() {
        assert_eq!(power_gain_db(3.0, 3.0).unwrap(), 0.0);
        assert_relative_eq!(power_gain_db(10.0, 1.0).unwrap(), 10.0, max_relative = 1e-15);
        let p_q1 = (15.0 + 825f64.sqrt()) / 2.0;
        assert_relative_eq!(power_gain_db(p_q1, 15.0).unwrap(), 1.635_868_430_256_815, max_relative = 1e-12);
        assert!(power_gain_db(1.0, 2.0).unwrap() < 0.0);
        assert!(power_gain_db(0.0, 2.0).is_err());
    }
}
