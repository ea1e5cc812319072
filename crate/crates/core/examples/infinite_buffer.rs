//! Large buffers: Φ against K and the K → ∞ limit on either side of ρ = 1.

use crosslayer_ee::queue::{infinite_k_loss, QueueParams};

fn main() -> crosslayer_ee::Result<()> {
    for (q, f) in [(0.4, 0.6), (0.5, 0.5), (0.6, 0.4)] {
        let limit = infinite_k_loss(q, f)?;
        print!("q = {q}, f = {f}:");
        for k in [1, 10, 100, 10_000] {
            print!("  K={k}: {:.6}", QueueParams::new(q, k)?.packet_loss(f)?);
        }
        println!("  | K→∞: {:.6}", limit.limit_phi);
    }
    Ok(())
}
