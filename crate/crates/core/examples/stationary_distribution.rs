//! Buffer occupancy of the birth-death chain for a few loads, with the
//! blocking probability that follows from it.

use crosslayer_ee::queue::QueueParams;

fn main() -> crosslayer_ee::Result<()> {
    let queue = QueueParams::new(0.5, 6)?;
    for f in [0.3, 0.5, 0.8] {
        let dist = queue.stationary_distribution(f)?;
        let probs: Vec<String> = dist.probs.iter().map(|p| format!("{p:.4}")).collect();
        println!(
            "f = {f:.1}  rho = {:.3}  pi = [{}]  phi = {:.5}",
            dist.load_rho,
            probs.join(", "),
            queue.packet_loss(f)?
        );
    }

    // One step of the chain leaves the stationary distribution unchanged.
    let f = 0.5;
    let pi = queue.stationary_distribution(f)?.probs;
    let next = queue.transition_matrix(f)?.step(&pi);
    let drift = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("max |pi P - pi| = {drift:.2e}");
    Ok(())
}
