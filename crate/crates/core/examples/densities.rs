//! Local densities and the truncated singular series for the shipped models.

use quadinter::density::{class_number_formula_check, local_density, singular_series, sser_two_path, DEFAULT_LEVEL_BUDGET};
use quadinter::error::DEFAULT_BUDGET;
use quadinter::model::ModelSystem;

fn main() -> quadinter::Result<()> {
    for name in ["quartic", "ternary"] {
        let m = ModelSystem::shipped(name)?;
        println!("{name}: r = {}, D = {}", m.r, m.d);
        for (p, l) in [(2, 3), (3, 2), (5, 2), (23, 1)] {
            let rep = local_density(p, l, &m, DEFAULT_BUDGET)?;
            let two = sser_two_path(p, l, &m, DEFAULT_BUDGET)?;
            println!(
                "  p = {p:>2}  {:?}  sigma_l = {:.9}  limit = {:.9}  two-path agree = {}",
                rep.method, rep.level_value, rep.value, two.agree
            );
        }
        let s = singular_series(&m, 100, DEFAULT_LEVEL_BUDGET)?;
        for f in s.factors.iter().take(4) {
            println!("  sigma_{} = {:.9} (levels {}, stabilized {})", f.p, f.value, f.levels_used, f.stabilized);
        }
        for f in s.factors.iter().filter(|f| !f.stabilized) {
            println!("  unsettled: p = {} after {} levels, value {:.6}", f.p, f.levels_used, f.value);
        }
        println!("  prod_(p <= 100) = {:.9}  certified = {}  tail ~ {:.2e}", s.product, s.certified, s.tail_heuristic);
    }
    for d in [-3, -4, -23, -47] {
        let c = class_number_formula_check(d, 200_000)?;
        println!("D = {d:>3}: L(1) = {:.9}  2 pi h / (w sqrt|D|) = {:.9}  pass = {}", c.l_value, c.formula, c.pass);
    }
    Ok(())
}
