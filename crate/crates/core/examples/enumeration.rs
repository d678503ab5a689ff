//! Zeros of the quartic model's Q2 in growing boxes, and the weighted count.

use quadinter::count::{enumerate_zeros, weighted_count};
use quadinter::error::DEFAULT_BUDGET;
use quadinter::model::ModelSystem;

fn main() -> quadinter::Result<()> {
    let m = ModelSystem::shipped("quartic")?;
    let w = m.weight()?.clone();
    for b in [10.0, 20.0, 40.0] {
        let zeros = enumerate_zeros(&m.q2, &w.integer_box(b), DEFAULT_BUDGET)?;
        let cnt = weighted_count(&m, &w, b, DEFAULT_BUDGET)?;
        println!("B = {b}: {} zeros in the box, {} on the support, lhs = {:.6}, lhs/B^2 = {:.6}",
            zeros.len(), cnt.zeros, cnt.lhs, cnt.lhs / (b * b));
    }
    Ok(())
}
