//! Where the optimal power sits relative to P_max at 20 and 30 dB SNR, for
//! busy and light traffic.

use crosslayer_ee::experiment::snr_cases;

fn main() -> crosslayer_ee::Result<()> {
    for case in snr_cases(10)? {
        println!(
            "q = {:.2}  SNR = {} dB  p* = {:.4} W  ({:.2}% of P_max)",
            case.q, case.snr_db, case.p_star, case.percent_of_pmax
        );
    }
    Ok(())
}
