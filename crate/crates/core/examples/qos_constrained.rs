//! Tightening the loss bound ε moves the operating point from p* to the
//! smallest power p0 that meets it, and eventually past the power cap.

use crosslayer_ee::efficiency::SystemParams;
use crosslayer_ee::optimizer::maximize_constrained;
use crosslayer_ee::queue::QueueParams;
use crosslayer_ee::success::SuccessModel;

fn fmt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_owned(), |p| format!("{p:.5}"))
}

fn main() -> crosslayer_ee::Result<()> {
    let sigma2 = 1e-3;
    let model = SuccessModel::exp_unknown_channel(4000.0, 1000.0, sigma2)?;
    let queue = QueueParams::new(0.9, 10)?;
    for eps in [1.0, 1e-2, 1e-4, 1e-6, 1e-9, 1e-12] {
        let sys = SystemParams::new(4000.0, 0.1, sigma2, 1e-2, 3.162, eps)?;
        let opt = maximize_constrained(&sys, &queue, &model)?;
        println!(
            "eps = {eps:.0e}  p* = {:.5}  p0 = {:>8}  p** = {:>8}  binding = {}",
            opt.p_star,
            fmt(opt.p0),
            fmt(opt.p_star_constrained),
            opt.binding
        );
    }
    Ok(())
}
