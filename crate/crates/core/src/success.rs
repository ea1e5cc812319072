//! Packet success-probability models `f(p)`.
//!
//! Both families are sigmoidal in the transmit power `p`: they start at (or
//! near) zero for vanishing power and saturate at one. The exponential family
//! models a transmitter with no channel knowledge; the Gaussian-tail family
//! models a known channel gain.

use serde::{Deserialize, Serialize};

use crate::error::{check, Result};

/// Success probability of one packet transmission as a function of power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SuccessModel {
    /// `f(p) = exp(-(2^(R/R0) - 1) σ² / p)`.
    ExpUnknownChannel {
        rate: f64,
        rate_ref: f64,
        noise_sigma2: f64,
    },
    /// `f(p) = Q(κ R/R0 - κ ln(1 + |h|² p / σ²))`.
    QKnownChannel {
        rate: f64,
        rate_ref: f64,
        spread_kappa: f64,
        channel_gain_hh: f64,
        noise_sigma2: f64,
    },
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    check(value > 0.0 && value.is_finite(), name, value, "a finite positive value")
}

impl SuccessModel {
    pub fn exp_unknown_channel(rate: f64, rate_ref: f64, noise_sigma2: f64) -> Result<Self> {
        check_positive("rate R", rate)?;
        check_positive("reference rate R0", rate_ref)?;
        check_positive("noise power", noise_sigma2)?;
        Ok(Self::ExpUnknownChannel {
            rate,
            rate_ref,
            noise_sigma2,
        })
    }

    pub fn q_known_channel(
        rate: f64,
        rate_ref: f64,
        spread_kappa: f64,
        channel_gain_hh: f64,
        noise_sigma2: f64,
    ) -> Result<Self> {
        check_positive("rate R", rate)?;
        check_positive("reference rate R0", rate_ref)?;
        check_positive("spread kappa", spread_kappa)?;
        check_positive("channel gain", channel_gain_hh)?;
        check_positive("noise power", noise_sigma2)?;
        Ok(Self::QKnownChannel {
            rate,
            rate_ref,
            spread_kappa,
            channel_gain_hh,
            noise_sigma2,
        })
    }

    pub fn noise_sigma2(&self) -> f64 {
        match *self {
            Self::ExpUnknownChannel { noise_sigma2, .. }
            | Self::QKnownChannel { noise_sigma2, .. } => noise_sigma2,
        }
    }

    /// Copy of the model with a different noise power, other parameters kept.
    pub fn with_noise_sigma2(mut self, sigma2: f64) -> Self {
        match &mut self {
            Self::ExpUnknownChannel { noise_sigma2, .. }
            | Self::QKnownChannel { noise_sigma2, .. } => *noise_sigma2 = sigma2,
        }
        self
    }

    /// The exponent constant `c = (2^(R/R0) - 1) σ²` of the exponential
    /// model, in watts. `None` for the known-channel model.
    pub fn exp_constant(&self) -> Option<f64> {
        match *self {
            Self::ExpUnknownChannel {
                rate,
                rate_ref,
                noise_sigma2,
            } => Some(snr_threshold(rate, rate_ref) * noise_sigma2),
            Self::QKnownChannel { .. } => None,
        }
    }

    pub fn success_probability(&self, p: f64) -> Result<f64> {
        check(p >= 0.0, "transmit power", p, "p >= 0")?;
        let f = match *self {
            Self::ExpUnknownChannel { .. } => {
                if p == 0.0 {
                    return Ok(0.0);
                }
                let c = self.exp_constant().unwrap_or_default();
                (-c / p).exp()
            }
            Self::QKnownChannel {
                rate,
                rate_ref,
                spread_kappa,
                channel_gain_hh,
                noise_sigma2,
            } => {
                let arg = spread_kappa * (rate / rate_ref)
                    - spread_kappa * (channel_gain_hh * p / noise_sigma2).ln_1p();
                gaussian_tail(arg)
            }
        };
        Ok(f.clamp(0.0, 1.0))
    }

    /// `df/dp`, in closed form for both families.
    pub fn success_derivative(&self, p: f64) -> Result<f64> {
        check(p > 0.0, "transmit power", p, "p > 0")?;
        let d = match *self {
            Self::ExpUnknownChannel { .. } => {
                let c = self.exp_constant().unwrap_or_default();
                (-c / p).exp() * c / (p * p)
            }
            Self::QKnownChannel {
                rate,
                rate_ref,
                spread_kappa,
                channel_gain_hh,
                noise_sigma2,
            } => {
                let snr = channel_gain_hh * p / noise_sigma2;
                let arg = spread_kappa * (rate / rate_ref) - spread_kappa * snr.ln_1p();
                // -Q'(x) is the standard normal density.
                gaussian_density(arg) * spread_kappa * channel_gain_hh
                    / (noise_sigma2 * (1.0 + snr))
            }
        };
        Ok(d.max(0.0))
    }
}

/// `2^(R/R0) - 1`, the SNR at which the exponential model reaches `1/e`.
pub fn snr_threshold(rate: f64, rate_ref: f64) -> f64 {
    2f64.powf(rate / rate_ref) - 1.0
}

/// Gaussian tail `Q(x) = P(Z > x)` for a standard normal `Z`.
pub fn gaussian_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

fn gaussian_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}
