//! Finite transmit buffer as a birth–death Markov chain.
//!
//! Each slot a packet arrives with probability `q` and the head-of-line
//! packet is delivered with probability `f`; the two events are independent.
//! States are buffer occupancies `0..=K`.

use serde::{Deserialize, Serialize};

use crate::error::{check, check_probability, Result};

/// Below this distance from one the load is treated as exactly balanced.
const BALANCED_LOAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueueParams {
    arrival_prob: f64,
    buffer_size: usize,
}

impl QueueParams {
    pub fn new(arrival_prob: f64, buffer_size: usize) -> Result<Self> {
        check(
            arrival_prob > 0.0 && arrival_prob <= 1.0,
            "arrival probability q",
            arrival_prob,
            "0 < q <= 1",
        )?;
        check(buffer_size >= 1, "buffer size K", buffer_size as f64, "K >= 1")?;
        Ok(Self {
            arrival_prob,
            buffer_size,
        })
    }

    pub fn arrival_prob(&self) -> f64 {
        self.arrival_prob
    }

    pub fn buffer_size(&self) -> usize {
        self.buffer_size
    }

    pub fn with_arrival_prob(&self, q: f64) -> Result<Self> {
        Self::new(q, self.buffer_size)
    }

    /// Load factor `ρ = q(1-f) / ((1-q) f)`.
    ///
    /// Returns `+∞` when the queue can never drain (`f = 0`) or always
    /// receives a packet (`q = 1`), and `0` when `f = 1`.
    pub fn load_rho(&self, f: f64) -> Result<f64> {
        check_probability("success probability f", f)?;
        let q = self.arrival_prob;
        if f == 1.0 {
            return Ok(0.0);
        }
        if f == 0.0 || q == 1.0 {
            return Ok(f64::INFINITY);
        }
        Ok(q * (1.0 - f) / ((1.0 - q) * f))
    }

    /// One-step transition matrix of the occupancy chain.
    pub fn transition_matrix(&self, f: f64) -> Result<TransitionMatrix> {
        check_probability("success probability f", f)?;
        let q = self.arrival_prob;
        let k = self.buffer_size;
        let n = k + 1;
        let up = q * (1.0 - f);
        let down = (1.0 - q) * f;
        let mut probs = vec![0.0; n * n];
        for s in 0..n {
            let row = &mut probs[s * n..(s + 1) * n];
            if s == 0 {
                row[0] = 1.0 - q + q * f;
            } else if s == k {
                row[k] = (1.0 - q) * (1.0 - f) + q;
            } else {
                row[s] = (1.0 - q) * (1.0 - f) + f * q;
            }
            if s < k {
                row[s + 1] = up;
            }
            if s > 0 {
                row[s - 1] = down;
            }
        }
        Ok(TransitionMatrix { states: n, probs })
    }

    /// Closed-form stationary distribution, `Π_s ∝ ρ^s`.
    pub fn stationary_distribution(&self, f: f64) -> Result<StationaryDistribution> {
        let rho = self.load_rho(f)?;
        let n = self.buffer_size + 1;
        let probs = if rho.is_infinite() {
            let mut v = vec![0.0; n];
            v[n - 1] = 1.0;
            v
        } else if (rho - 1.0).abs() < BALANCED_LOAD_TOL {
            vec![1.0 / n as f64; n]
        } else {
            // Weights relative to the most likely state so nothing overflows.
            let weights: Vec<f64> = if rho < 1.0 {
                (0..n).map(|s| rho.powi(s as i32)).collect()
            } else {
                let r = rho.recip();
                (0..n).map(|s| r.powi((n - 1 - s) as i32)).collect()
            };
            let total = compensated_sum(weights.iter().copied());
            weights.into_iter().map(|w| w / total).collect()
        };
        Ok(StationaryDistribution {
            probs,
            load_rho: rho,
        })
    }

    /// Stationary probability `Π_K` that the buffer is full.
    pub fn full_buffer_prob(&self, f: f64) -> Result<f64> {
        let rho = self.load_rho(f)?;
        Ok(full_buffer_from_rho(rho, self.buffer_size))
    }

    /// Fraction of arriving packets that are blocked, `Φ = (1 - f) Π_K`.
    pub fn packet_loss(&self, f: f64) -> Result<f64> {
        Ok(((1.0 - f) * self.full_buffer_prob(f)?).clamp(0.0, 1.0))
    }

    /// `1 - Φ`, computed directly so it keeps full relative precision when
    /// almost every packet is blocked.
    pub fn delivery_prob(&self, f: f64) -> Result<f64> {
        let rho = self.load_rho(f)?;
        let full = full_buffer_from_rho(rho, self.buffer_size);
        let not_full = not_full_from_rho(rho, self.buffer_size);
        Ok((f * full + not_full).clamp(0.0, 1.0))
    }
}

/// `1 - Π_K = (1 - ρ^K) / (1 - ρ^{K+1})`.
fn not_full_from_rho(rho: f64, buffer_size: usize) -> f64 {
    let k = buffer_size as f64;
    if rho.is_infinite() {
        0.0
    } else if rho == 0.0 {
        1.0
    } else if (rho - 1.0).abs() < BALANCED_LOAD_TOL {
        k / (k + 1.0)
    } else if rho < 1.0 {
        let ln_rho = rho.ln();
        (k * ln_rho).exp_m1() / ((k + 1.0) * ln_rho).exp_m1()
    } else {
        let r = rho.recip();
        let ln_r = r.ln();
        r * (k * ln_r).exp_m1() / ((k + 1.0) * ln_r).exp_m1()
    }
}

/// `Π_K = ρ^K (ρ - 1) / (ρ^{K+1} - 1)`, evaluated without cancellation or
/// overflow on either side of `ρ = 1`.
pub fn full_buffer_from_rho(rho: f64, buffer_size: usize) -> f64 {
    let k = buffer_size as f64;
    if rho.is_infinite() {
        1.0
    } else if rho == 0.0 {
        0.0
    } else if (rho - 1.0).abs() < BALANCED_LOAD_TOL {
        1.0 / (k + 1.0)
    } else if rho < 1.0 {
        let ln_rho = rho.ln();
        (k * ln_rho).exp() * (1.0 - rho) / -((k + 1.0) * ln_rho).exp_m1()
    } else {
        // 1 / (1 + r + ... + r^K) with r = 1/ρ < 1.
        let r = rho.recip();
        (1.0 - r) / -((k + 1.0) * r.ln()).exp_m1()
    }
}

/// Row-major transition matrix: `prob(from, to)`; every row sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    states: usize,
    probs: Vec<f64>,
}

impl TransitionMatrix {
    pub fn states(&self) -> usize {
        self.states
    }

    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.probs[from * self.states + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.probs[from * self.states..(from + 1) * self.states]
    }

    /// Row vector times matrix: one step of the distribution `π ↦ πP`.
    pub fn step(&self, dist: &[f64]) -> Vec<f64> {
        assert_eq!(dist.len(), self.states, "distribution length mismatch");
        let mut out = vec![0.0; self.states];
        for (from, &mass) in dist.iter().enumerate() {
            for (to, &p) in self.row(from).iter().enumerate() {
                out[to] += mass * p;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    pub probs: Vec<f64>,
    pub load_rho: f64,
}

impl StationaryDistribution {
    pub fn full_buffer_prob(&self) -> f64 {
        *self.probs.last().expect("at least two states")
    }
}

/// Large-buffer loss limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfiniteBufferLoss {
    /// `(1 - f)/q` when `f < q`, else 0. Not clamped.
    pub phi: f64,
    /// Set when `phi` exceeds one.
    pub exceeds_unity: bool,
    /// `(1 - f) lim Π_K = (q - f)/q` when `f < q`, else 0: the value
    /// `packet_loss` actually approaches as `K` grows.
    pub limit_phi: f64,
}

/// Loss fraction in the `K → ∞` limit for arrival probability `q` and
/// success probability `f`.
pub fn infinite_k_loss(q: f64, f: f64) -> Result<InfiniteBufferLoss> {
    check(q > 0.0 && q <= 1.0, "arrival probability q", q, "0 < q <= 1")?;
    check(f > 0.0 && f <= 1.0, "success probability f", f, "0 < f <= 1")?;
    let (phi, limit_phi) = if f < q {
        ((1.0 - f) / q, (q - f) / q)
    } else {
        (0.0, 0.0)
    };
    Ok(InfiniteBufferLoss {
        phi,
        exceeds_unity: phi > 1.0,
        limit_phi,
    })
}

/// `lim_{K→∞} Π_K`: `(ρ - 1)/ρ` above balance, zero at or below it.
pub fn infinite_k_full_buffer_prob(rho: f64) -> f64 {
    if rho.is_infinite() {
        1.0
    } else if rho > 1.0 {
        (rho - 1.0) / rho
    } else {
        0.0
    }
}

/// Kahan–Babuška (Neumaier) summation.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
