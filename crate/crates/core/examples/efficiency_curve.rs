//! η(p) over a dBm grid for several arrival rates. Lighter traffic spends
//! fewer slots transmitting, so its curve peaks at a higher power.

use crosslayer_ee::efficiency::{efficiency_curve, SystemParams};
use crosslayer_ee::queue::QueueParams;
use crosslayer_ee::success::SuccessModel;
use crosslayer_ee::units::dbm_to_watts;

fn main() -> crosslayer_ee::Result<()> {
    let sigma2 = dbm_to_watts(0.0);
    let model = SuccessModel::exp_unknown_channel(4000.0, 1000.0, sigma2)?;
    let sys = SystemParams::new(4000.0, 100.0 * sigma2, sigma2, dbm_to_watts(10.0), dbm_to_watts(35.0), 1.0)?;
    let powers: Vec<f64> = (0..=30).map(|i| dbm_to_watts(5.0 + i as f64)).collect();

    for q in [0.1, 0.5, 1.0] {
        let queue = QueueParams::new(q, 10)?;
        let curve = efficiency_curve(&sys, &queue, &model, &powers)?;
        let best = curve.iter().max_by(|a, b| a.eta.total_cmp(&b.eta)).expect("non-empty grid");
        println!("q = {q}");
        for pt in curve.iter().step_by(5) {
            println!("  p = {:8.4} W  eta = {:9.1} bit/J  phi = {:.4}", pt.power_p, pt.eta, pt.phi);
        }
        println!("  grid peak at {:.4} W ({:.1} bit/J)", best.power_p, best.eta);
    }
    Ok(())
}
