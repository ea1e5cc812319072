//! Queue-aware energy efficiency and power control for a transmitter with a
//! finite packet buffer.
//!
//! A transmitter stores Bernoulli(`q`) packet arrivals in a buffer of `K`
//! slots and sends the head-of-line packet each slot, succeeding with
//! probability `f(p)` at transmit power `p`. Its energy efficiency counts
//! delivered bits per joule of *total* device energy, fixed consumption
//! included:
//!
//! ```text
//! η(p) = q(1 - Φ(p)) R / (b + a·p·q(1 - Φ(p)) / f(p))
//! ```
//!
//! where `Φ` is the stationary fraction of arrivals blocked by a full
//! buffer. For sigmoidal `f`, `η` is quasi-concave in `p` with a unique
//! maximizer, and a packet-loss bound `Φ ≤ ε` plus a power cap turn the
//! optimum into the projection `min(max(p0, p*), p_max)`.
//!
//! Modules:
//! - [`success`]: success-probability models `f(p)`.
//! - [`queue`]: the buffer's Markov chain, `Π_K` and `Φ`.
//! - [`efficiency`]: `η(p)`, its stationarity residual and the dB gain.
//! - [`optimizer`]: `p*`, `p0` and the constrained optimum.
//! - [`sim`]: slotted Monte Carlo validation of `Φ`.
//! - [`config`], [`experiment`], [`cli`]: sweeps and CSV output.
//!
//! ```
//! use crosslayer_ee::{efficiency::SystemParams, optimizer, queue::QueueParams, success::SuccessModel};
//!
//! let model = SuccessModel::exp_unknown_channel(4000.0, 1000.0, 1e-3)?;
//! let sys = SystemParams::new(4000.0, 0.1, 1e-3, 1e-2, 3.16, 0.01)?;
//! let queue = QueueParams::new(0.5, 10)?;
//! let opt = optimizer::maximize_constrained(&sys, &queue, &model)?;
//! assert!(opt.p_star_constrained.unwrap() >= opt.p_star);
//! # Ok::<(), crosslayer_ee::Error>(())
//! ```

pub mod cli;
pub mod config;
pub mod efficiency;
pub mod error;
pub mod experiment;
pub mod optimizer;
pub mod queue;
pub mod sim;
pub mod success;
pub mod units;

pub use error::{Error, Result};
