//! Simulated blocking fraction against the stationary value as the number
//! of packets per run grows.

use crosslayer_ee::queue::QueueParams;
use crosslayer_ee::sim::{convergence_study, simulate, SimConfig};

fn main() -> crosslayer_ee::Result<()> {
    let queue = QueueParams::new(0.5, 10)?;
    let cfg = SimConfig::new(queue, 0.5, 1_000, 2_000, 42);
    let phi = queue.packet_loss(cfg.success_prob)?;
    println!("stationary phi = {phi:.6}");
    for row in convergence_study(&cfg, &[100, 1_000, 10_000])? {
        println!(
            "  {:>6} packets: {:.6} ± {:.6}  (gap {:.2}%)",
            row.packet_count,
            row.mean_loss,
            row.std_error,
            100.0 * row.relative_gap
        );
    }

    // Short runs start from an empty buffer; a warm-up removes that bias.
    let mut warm = cfg.clone();
    warm.warmup_slots = 500;
    let rep = simulate(&warm)?;
    println!("  with warm-up:    {:.6} ± {:.6}  (gap {:.2}%)", rep.mean_loss_fraction, rep.std_error, 100.0 * rep.relative_gap);
    Ok(())
}
