//! Power saved, in dB, by optimizing for the actual traffic rather than
//! assuming the buffer is never empty.

use crosslayer_ee::efficiency::{power_gain_db, SystemParams};
use crosslayer_ee::optimizer::maximize_constrained;
use crosslayer_ee::queue::QueueParams;
use crosslayer_ee::success::SuccessModel;

fn main() -> crosslayer_ee::Result<()> {
    let sigma2 = 1e-3;
    let model = SuccessModel::exp_unknown_channel(4000.0, 1000.0, sigma2)?;
    for b_ratio in [10.0, 100.0, 1000.0] {
        let sys = SystemParams::new(4000.0, b_ratio * sigma2, sigma2, 1e-2, 3.162, 1.0)?;
        let saturated = maximize_constrained(&sys, &QueueParams::new(1.0, 10)?, &model)?;
        let reference = saturated.p_star_constrained.expect("no loss bound");
        println!("b/sigma2 = {b_ratio}: saturated optimum {reference:.5} W");
        for q in [0.05, 0.2, 0.5, 0.8] {
            let opt = maximize_constrained(&sys, &QueueParams::new(q, 10)?, &model)?;
            let p = opt.p_star_constrained.expect("no loss bound");
            println!("  q = {q:.2}  p = {p:.5} W  gain = {:.3} dB", power_gain_db(reference, p)?);
        }
    }
    Ok(())
}
