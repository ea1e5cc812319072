use crosslayer_ee::queue::{infinite_k_full_buffer_prob, QueueParams};
use proptest::prelude::*;

const PROBS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

#[test]
fn closed_form_is_a_fixed_point_of_the_chain() {
    for &q in &PROBS {
        for &f in &PROBS {
            for &k in &[1, 2, 5, 10, 50] {
                let queue = QueueParams::new(q, k).unwrap();
                let dist = queue.stationary_distribution(f).unwrap();
                let stepped = queue.transition_matrix(f).unwrap().step(&dist.probs);
                let err = stepped.iter().zip(&dist.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(err <= 1e-10, "q={q} f={f} K={k}: {err}");
                let total: f64 = dist.probs.iter().sum();
                assert!((total - 1.0).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn loss_strictly_decreasing_in_success_probability() {
    for &q in &PROBS {
        for &k in &[1, 3, 10, 40] {
            let queue = QueueParams::new(q, k).unwrap();
            let losses: Vec<f64> = (1..=1000).map(|i| queue.packet_loss(i as f64 / 1000.0).unwrap()).collect();
            assert!(losses.windows(2).all(|w| w[1] < w[0]), "q={q} K={k}");
        }
    }
}

#[test]
fn loss_nondecreasing_in_arrival_probability() {
    for &f in &PROBS {
        for &k in &[1, 3, 10, 40] {
            let losses: Vec<f64> = (1..=1000)
                .map(|i| QueueParams::new(i as f64 / 1000.0, k).unwrap().packet_loss(f).unwrap())
                .collect();
            assert!(losses.windows(2).all(|w| w[1] >= w[0]), "f={f} K={k}");
        }
    }
}

#[test]
fn large_buffer_matches_limit() {
    for &q in &PROBS {
        for &f in &PROBS {
            let queue = QueueParams::new(q, 10_000).unwrap();
            let rho = queue.load_rho(f).unwrap();
            if (rho - 1.0).abs() < 1e-2 {
                continue;
            }
            let pk = queue.full_buffer_prob(f).unwrap();
            assert!((pk - infinite_k_full_buffer_prob(rho)).abs() <= 1e-6, "q={q} f={f}");
        }
    }
}

proptest! {
    #[test]
    fn distribution_is_normalized_and_geometric(q in 0.01f64..1.0, f in 0.01f64..1.0, k in 1usize..200) {
        let d = QueueParams::new(q, k).unwrap().stationary_distribution(f).unwrap();
        let total: f64 = d.probs.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        prop_assert!(d.probs.iter().all(|p| (0.0..=1.0).contains(p)));
        for w in d.probs.windows(2) {
            if w[0] > 1e-300 && w[1] > 1e-300 {
                let rho = if (d.load_rho - 1.0).abs() < 1e-9 { 1.0 } else { d.load_rho };
                prop_assert!((w[1] / w[0] - rho).abs() <= 1e-9 * rho.max(1.0));
            }
        }
    }

    #[test]
    fn full_buffer_closed_form_equals_last_state(q in 0.01f64..1.0, f in 0.0f64..=1.0, k in 1usize..500) {
        let queue = QueueParams::new(q, k).unwrap();
        let last = *queue.stationary_distribution(f).unwrap().probs.last().unwrap();
        let pk = queue.full_buffer_prob(f).unwrap();
        prop_assert!((last - pk).abs() <= 1e-12 * pk.max(1e-300) || (last - pk).abs() <= 1e-300);
    }
}
