//! Power control: the unconstrained maximizer of `η`, the smallest power
//! meeting the loss bound, and their projection onto the feasible interval.
//!
//! `η` is quasi-concave in `p` for sigmoidal success models, so a bracketed
//! golden-section search over `ln p` finds the global maximum, and `Φ` is
//! strictly decreasing in `p`, so bisection finds the loss threshold.

use serde::Serialize;

use crate::efficiency::{efficiency, loss_at_power, SystemParams};
use crate::error::{Error, Result};
use crate::queue::QueueParams;
use crate::success::SuccessModel;

const MAX_EXPANSIONS: usize = 60;
const SCAN_POINTS: usize = 64;
/// Golden-section stops when the bracket in `ln p` is this narrow.
const LOG_WIDTH_TOL: f64 = 1e-9;
const BISECTION_REL_TOL: f64 = 1e-9;

/// Result of a one-dimensional maximization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineMax {
    pub argmax: f64,
    pub value: f64,
    pub iterations: usize,
    /// Grid neighbours of the coarse maximum; the value at `argmax` is at
    /// least the value at both ends.
    pub bracket: (f64, f64),
}

/// Maximizes a quasi-concave `g` over `p > 0`.
///
/// A coarse log-spaced scan of `[lo, hi]` locates the peak; while the
/// scan's first maximum sits on an endpoint, that endpoint is pushed out by
/// a factor of two (at most 60 times). Golden-section search over `ln p`
/// then refines within the two grid neighbours of the peak. Ties resolve to
/// the smaller power.
pub fn maximize_quasi_concave<G>(g: G, lo: f64, hi: f64) -> Result<LineMax>
where
    G: Fn(f64) -> Result<f64>,
{
    assert!(lo > 0.0 && hi > lo, "bracket must satisfy 0 < lo < hi");
    let (mut lo, mut hi) = (lo, hi);
    let mut expansions = 0;
    let (peak_lo, peak_hi) = loop {
        let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
        let grid: Vec<f64> = (0..SCAN_POINTS)
            .map(|i| (ln_lo + (ln_hi - ln_lo) * i as f64 / (SCAN_POINTS - 1) as f64).exp())
            .collect();
        let values = grid.iter().map(|&p| g(p)).collect::<Result<Vec<_>>>()?;
        let best = first_argmax(&values);
        let last = SCAN_POINTS - 1;
        let interior = best > 0 && best < last && values[best] > values[last];
        if interior {
            break (grid[best - 1], grid[best + 1]);
        }
        if expansions == MAX_EXPANSIONS {
            return Err(Error::NoInteriorMaximum { expansions });
        }
        expansions += 1;
        if best == 0 {
            lo /= 2.0;
            if values[0] == values[last] {
                hi *= 2.0;
            }
        } else {
            hi *= 2.0;
        }
    };

    let (argmax, iterations) = golden_section_log(&g, peak_lo, peak_hi)?;
    let value = g(argmax)?;
    Ok(LineMax {
        argmax,
        value,
        iterations,
        bracket: (peak_lo, peak_hi),
    })
}

fn first_argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn golden_section_log<G>(g: &G, lo: f64, hi: f64) -> Result<(f64, usize)>
where
    G: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut gc = g(c.exp())?;
    let mut gd = g(d.exp())?;
    let mut iterations = 0;
    while b - a > LOG_WIDTH_TOL {
        iterations += 1;
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c.exp())?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d.exp())?;
        }
    }
    Ok((((a + b) / 2.0).exp(), iterations))
}

fn search_bracket(sys: &SystemParams, model: &SuccessModel) -> (f64, f64) {
    (model.noise_sigma2() * 1e-3, sys.p_max * 1e3)
}

/// Unconstrained maximizer `p*` of `η`.
pub fn maximize_unconstrained(
    sys: &SystemParams,
    queue: &QueueParams,
    model: &SuccessModel,
) -> Result<LineMax> {
    sys.validate()?;
    let (lo, hi) = search_bracket(sys, model);
    maximize_quasi_concave(|p| Ok(efficiency(sys, queue, model, p)?.eta), lo, hi)
}

/// Smallest power in `[p_min, p_max]` whose loss fraction is at most `ε`.
/// `None` when even `p_max` violates the bound.
pub fn qos_threshold_p0(
    sys: &SystemParams,
    queue: &QueueParams,
    model: &SuccessModel,
) -> Result<Option<f64>> {
    sys.validate()?;
    let eps = sys.loss_bound_epsilon;
    let meets = |p: f64| -> Result<bool> { Ok(loss_at_power(queue, model, p)? <= eps) };
    if !meets(sys.p_max)? {
        return Ok(None);
    }
    if meets(sys.p_min)? {
        return Ok(Some(sys.p_min));
    }
    let (mut lo, mut hi) = (sys.p_min, sys.p_max);
    while hi - lo > BISECTION_REL_TOL * hi {
        let mid = (lo * hi).sqrt();
        if meets(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Which constraint determines the constrained optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    /// `p*` itself is feasible.
    Interior,
    /// `p*` lies below the feasible set, whose lower end `p0` is used.
    QosBound,
    /// The lower end of the feasible set exceeds `p_max`, so `p_max` is used.
    PowerCap,
    /// No power up to `p_max` meets the loss bound.
    Infeasible,
}

impl Binding {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Interior => "interior",
            Self::QosBound => "qos_bound",
            Self::PowerCap => "power_cap",
            Self::Infeasible => "infeasible",
        }
    }
}

impl std::fmt::Display for Binding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Optimum {
    pub p_star: f64,
    pub eta_star: f64,
    pub p0: Option<f64>,
    pub p_star_constrained: Option<f64>,
    pub eta_constrained: Option<f64>,
    pub binding: Binding,
    pub iterations: usize,
    pub bracket: (f64, f64),
}

impl Optimum {
    pub fn is_feasible(&self) -> bool {
        self.binding != Binding::Infeasible
    }
}

/// Constrained optimum `min(max(p0, p*), p_max)`.
pub fn maximize_constrained(
    sys: &SystemParams,
    queue: &QueueParams,
    model: &SuccessModel,
) -> Result<Optimum> {
    let unconstrained = maximize_unconstrained(sys, queue, model)?;
    let p0 = qos_threshold_p0(sys, queue, model)?;
    let p_star = unconstrained.argmax;
    let (p_star_constrained, binding) = match p0 {
        None => (None, Binding::Infeasible),
        Some(p0) => {
            let lifted = p0.max(p_star);
            if lifted > sys.p_max {
                (Some(sys.p_max), Binding::PowerCap)
            } else if p0 > p_star {
                (Some(p0), Binding::QosBound)
            } else {
                (Some(p_star), Binding::Interior)
            }
        }
    };
    let eta_constrained = p_star_constrained
        .map(|p| efficiency(sys, queue, model, p).map(|pt| pt.eta))
        .transpose()?;
    Ok(Optimum {
        p_star,
        eta_star: unconstrained.value,
        p0,
        p_star_constrained,
        eta_constrained,
        binding,
        iterations: unconstrained.iterations,
        bracket: unconstrained.bracket,
    })
}

/// Arrival-probability limits of the power-control problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrivalLimit {
    /// Sparse traffic: maximize `f(p)/p`.
    QToZero,
    /// Saturated traffic: maximize `f(p)/(a·p + b)`.
    QToOne,
}

pub fn limit_optimizer(
    sys: &SystemParams,
    model: &SuccessModel,
    which: ArrivalLimit,
) -> Result<f64> {
    sys.validate()?;
    let (lo, hi) = search_bracket(sys, model);
    let max = match which {
        ArrivalLimit::QToZero => {
            maximize_quasi_concave(|p| Ok(model.success_probability(p)? / p), lo, hi)?
        }
        ArrivalLimit::QToOne => maximize_quasi_concave(
            |p| Ok(model.success_probability(p)? / (sys.amp_coeff_a * p + sys.fixed_power_b)),
            lo,
            hi,
        )?,
    };
    Ok(max.argmax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exp_model(ratio: f64) -> SuccessModel {
        SuccessModel::exp_unknown_channel(ratio * 1000.0, 1000.0, 1.0).unwrap()
    }

    fn sys(b: f64, eps: f64) -> SystemParams {
        SystemParams::new(4000.0, b, 1.0, 1e-2, 1e3, eps).unwrap()
    }

    #[test]
    fn golden_section_finds_smooth_peak() {
        let m = maximize_quasi_concave(|p: f64| Ok(-(p.ln() - 2f64.ln()).powi(2)), 1e-3, 1e3).unwrap();
        assert_relative_eq!(m.argmax, 2.0, max_relative = 1e-8);
        assert!(m.bracket.0 < 2.0 && 2.0 < m.bracket.1);
    }

    #[test]
    fn bracket_expands_toward_a_distant_peak() {
        let m = maximize_quasi_concave(|p: f64| Ok(-(p.ln() - 1e6f64.ln()).powi(2)), 1e-3, 1.0).unwrap();
        assert_relative_eq!(m.argmax, 1e6, max_relative = 1e-8);
    }

    #[test]
    fn monotone_objective_has_no_interior_maximum() {
        let err = maximize_quasi_concave(|p: f64| Ok(1.0 / p), 1.0, 2.0).unwrap_err();
        assert!(matches!(err, Error::NoInteriorMaximum { expansions: 60 }));
    }

    #[test]
    fn saturated_queue_without_fixed_power() {
        // q = 1, b = 0, R/R0 = 2: η ∝ exp(-3/p)/p peaks at p = 3.
        let queue = QueueParams::new(1.0, 10).unwrap();
        let m = maximize_unconstrained(&sys(0.0, 1.0), &queue, &exp_model(2.0)).unwrap();
        assert_relative_eq!(m.argmax, 3.0, max_relative = 1e-6);
    }

    #[test]
    fn saturated_queue_with_fixed_power() {
        let queue = QueueParams::new(1.0, 10).unwrap();
        let m = maximize_unconstrained(&sys(10.0, 1.0), &queue, &exp_model(4.0)).unwrap();
        assert_relative_eq!(m.argmax, (15.0 + 825f64.sqrt()) / 2.0, max_relative = 1e-6);
    }

    #[test]
    fn vacuous_loss_bound_gives_lower_search_limit() {
        let queue = QueueParams::new(0.5, 10).unwrap();
        let s = sys(10.0, 1.0);
        assert_eq!(qos_threshold_p0(&s, &queue, &exp_model(4.0)).unwrap(), Some(s.p_min));
    }

    #[test]
    fn unreachable_loss_bound_is_infeasible() {
        let queue = QueueParams::new(1.0, 10).unwrap();
        // Φ(p_max) = 1 - exp(-15/1000) ≈ 0.0149 > 0.001.
        let s = sys(10.0, 1e-3);
        assert_eq!(qos_threshold_p0(&s, &queue, &exp_model(4.0)).unwrap(), None);
        let opt = maximize_constrained(&s, &queue, &exp_model(4.0)).unwrap();
        assert_eq!(opt.binding, Binding::Infeasible);
        assert!(opt.p_star_constrained.is_none());
    }

    #[test]
    fn projection_cases() {
        let queue = QueueParams::new(0.5, 10).unwrap();
        let model = exp_model(4.0);

        let free = maximize_constrained(&sys(10.0, 1.0), &queue, &model).unwrap();
        assert_eq!(free.binding, Binding::Interior);
        assert_eq!(free.p_star_constrained, Some(free.p_star));

        let tight = maximize_constrained(&sys(10.0, 1e-4), &queue, &model).unwrap();
        assert_eq!(tight.binding, Binding::QosBound);
        assert_eq!(tight.p_star_constrained, tight.p0);
        assert!(tight.eta_constrained.unwrap() < tight.eta_star);

        let capped_sys = SystemParams::new(4000.0, 10.0, 1.0, 1.0, 5.0, 1.0).unwrap();
        let capped = maximize_constrained(&capped_sys, &queue, &model).unwrap();
        assert!(capped.p_star > 5.0);
        assert_eq!(capped.binding, Binding::PowerCap);
        assert_eq!(capped.p_star_constrained, Some(5.0));
    }

    #[test]
    fn limit_optimizers() {
        let model = exp_model(4.0);
        assert_relative_eq!(
            limit_optimizer(&sys(10.0, 1.0), &model, ArrivalLimit::QToZero).unwrap(),
            15.0,
            max_relative = 1e-7
        );
        assert_relative_eq!(
            limit_optimizer(&sys(0.0, 1.0), &model, ArrivalLimit::QToOne).unwrap(),
            15.0,
            max_relative = 1e-7
        );
        assert_relative_eq!(
            limit_optimizer(&sys(10.0, 1.0), &model, ArrivalLimit::QToOne).unwrap(),
            (15.0 + 825f64.sqrt()) / 2.0,
            max_relative = 1e-7
        );
    }

    #[test]
    fn sparse_traffic_approaches_q_to_zero_limit() {
        let model = exp_model(4.0);
        let s = sys(10.0, 1.0);
        let queue = QueueParams::new(1e-4, 10).unwrap();
        let p = maximize_unconstrained(&s, &queue, &model).unwrap().argmax;
        let limit = limit_optimizer(&s, &model, ArrivalLimit::QToZero).unwrap();
        assert_relative_eq!(p, limit, max_relative = 1e-3);
    }
}
