use crosslayer_ee::success::SuccessModel;
use proptest::prelude::*;

fn models() -> Vec<SuccessModel> {
    vec![
        SuccessModel::exp_unknown_channel(4000.0, 1000.0, 1.0).unwrap(),
        SuccessModel::exp_unknown_channel(256_000.0, 64_000.0, 1e-3).unwrap(),
        SuccessModel::q_known_channel(4000.0, 1000.0, 1.0, 1.0, 1.0).unwrap(),
        SuccessModel::q_known_channel(2000.0, 1000.0, 3.0, 0.2, 1e-2).unwrap(),
    ]
}

#[test]
fn derivative_matches_central_differences() {
    for model in models() {
        let sigma2 = model.noise_sigma2();
        for i in 0..20 {
            // SNR from 1 to 1e4; saturated points are skipped below.
            let p = sigma2 * 10f64.powf(4.0 * i as f64 / 19.0);
            let h = 1e-6 * p;
            let fd = (model.success_probability(p + h).unwrap() - model.success_probability(p - h).unwrap())
                / (2.0 * h);
            let d = model.success_derivative(p).unwrap();
            let f = model.success_probability(p).unwrap();
            if !(1e-12..=1.0 - 1e-6).contains(&f) {
                continue;
            }
            assert!((d - fd).abs() <= 1e-4 * fd.abs(), "{model:?} at p = {p}: {d} vs {fd}");
        }
    }
}

proptest! {
    #[test]
    fn output_is_a_probability(idx in 0usize..4, log_p in -8.0f64..8.0) {
        let f = models()[idx].success_probability(10f64.powf(log_p)).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn nondecreasing_in_power(idx in 0usize..4, log_p in -8.0f64..8.0, step in 1e-9f64..3.0) {
        let m = models()[idx];
        let p1 = 10f64.powf(log_p);
        let p2 = 10f64.powf(log_p + step);
        prop_assert!(m.success_probability(p1).unwrap() <= m.success_probability(p2).unwrap());
        prop_assert!(m.success_derivative(p1).unwrap() >= 0.0);
    }
}
