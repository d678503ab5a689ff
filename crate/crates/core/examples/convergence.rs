//! Weighted counts on the quartic model against the predicted main term.

use quadinter::count::{convergence_table, MainTermConfig};
use quadinter::error::DEFAULT_BUDGET;
use quadinter::model::ModelSystem;

fn main() -> quadinter::Result<()> {
    let m = ModelSystem::shipped("quartic")?;
    let w = m.weight()?.clone();
    let rows = convergence_table(&m, &w, &[20.0, 40.0, 80.0, 160.0], &MainTermConfig::default(), DEFAULT_BUDGET)?;
    println!("{:>6} {:>14} {:>10} {:>10} {:>14} {:>8} {:>10}", "B", "lhs", "S", "J", "main", "ratio", "twisted");
    for r in rows {
        println!(
            "{:>6} {:>14.3} {:>10.6} {:>10.6} {:>14.3} {:>8.4} {:>10.5}",
            r.b, r.lhs, r.s_trunc, r.j, r.main_term, r.ratio, r.twisted_max_ratio.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
