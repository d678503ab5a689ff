//! The delta-symbol expansion: calibration constants and the detected zero.

use quadinter::delta::{calibrate, delta_approx, HKernel};

fn main() -> quadinter::Result<()> {
    let h = HKernel::new();
    for q in [3.0, 4.0, 5.0, 8.0, 10.0, 16.0, 20.0] {
        let cal = calibrate(&h, q)?;
        let bound = (2.0 * q * q) as i64;
        let mut worst = 0.0f64;
        for m in -bound..=bound {
            let d = delta_approx(&h, &cal, m)?;
            worst = worst.max((d - if m == 0 { 1.0 } else { 0.0 }).abs());
        }
        println!("Q = {q:>4}: c_Q - 1 = {:+.3e}   max |delta - [m=0]| over |m| <= 2Q^2 = {worst:.2e}", cal.c_q - 1.0);
    }
    Ok(())
}
