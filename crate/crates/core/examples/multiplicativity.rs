//! Twisted multiplicativity of the exponential sums over coprime splits.

use quadinter::error::DEFAULT_BUDGET;
use quadinter::expsum::verify_multiplicativity;
use quadinter::quadform::RaryForm;

fn main() -> quadinter::Result<()> {
    let q1 = RaryForm::diagonal(&[1, 1, 1, 1]);
    let q2 = RaryForm::diagonal(&[-1, 1, 2, 3]);
    let mut nonzero = 0;
    let mut worst = 0.0f64;
    for m in 1..=3 {
        for mvec in [[0, 0, 0, 0], [1, 0, 2, 1], [3, -1, 0, 2]] {
            for (a, b, c, d) in [(5, 1, 1, 7), (1, 5, 7, 1), (5, 1, 7, 1), (1, 5, 1, 7), (3, 5, 1, 7), (5, 3, 7, 1)] {
                let r = verify_multiplicativity(a, b, c, d, 23, m, -23, &mvec, &q1, &q2, DEFAULT_BUDGET)?;
                if r.lhs.norm() > 1e-6 {
                    nonzero += 1;
                    println!("m = {m}, mvec = {mvec:?}, ({a},{b}) x ({c},{d}): lhs = {:.6}, rhs = {:.6}, rel diff {:.2e}",
                        r.lhs, r.rhs, r.rel_diff);
                }
                worst = worst.max(r.rel_diff);
            }
        }
    }
    println!("{nonzero} nonzero cases, worst relative difference {worst:.2e}");
    Ok(())
}
