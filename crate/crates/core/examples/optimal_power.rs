//! Unconstrained maximizer p* for both success models, checked against the
//! stationarity condition.

use crosslayer_ee::efficiency::{stationarity_residual, SystemParams};
use crosslayer_ee::optimizer::maximize_unconstrained;
use crosslayer_ee::queue::QueueParams;
use crosslayer_ee::success::SuccessModel;

fn main() -> crosslayer_ee::Result<()> {
    let sigma2 = 1e-3;
    let sys = SystemParams::new(4000.0, 0.1, sigma2, 1e-2, 3.162, 1.0)?;
    let models = [
        ("exp", SuccessModel::exp_unknown_channel(4000.0, 1000.0, sigma2)?),
        ("qfunc", SuccessModel::q_known_channel(4000.0, 1000.0, 1.0, 1.0, sigma2)?),
    ];
    for (name, model) in &models {
        for q in [0.2, 0.5, 1.0] {
            let queue = QueueParams::new(q, 10)?;
            let m = maximize_unconstrained(&sys, &queue, model)?;
            let r = stationarity_residual(&sys, &queue, model, m.argmax)?;
            println!(
                "{name:5} q = {q:.1}  p* = {:.6} W  eta* = {:8.1} bit/J  residual = {:.1e}  ({} iterations)",
                m.argmax,
                m.value,
                r.relative(),
                m.iterations
            );
        }
    }
    Ok(())
}
