//! `tau_inf` and the singular integral for each shipped model, by both routes.

use quadinter::archimedean::singular_integral;
use quadinter::model::ModelSystem;

fn main() -> quadinter::Result<()> {
    for name in ModelSystem::shipped_names() {
        let m = ModelSystem::shipped(name)?;
        let w = m.weight()?.clone();
        let t = std::time::Instant::now();
        let s = singular_integral(&m, &w, 0.02, 1_000_000, 42)?;
        println!(
            "{name:>8}: tau = {:.8} +- {:.1e} (limit {:.8})  J_id = {:.8}  J_direct = {:.8} +- {:.1e}  {:.2} sigma  [{:.1?}]",
            s.tau.tau, s.tau.stderr, s.tau.tau_limit, s.j_identity, s.j_direct, s.j_direct_stderr, s.sigmas, t.elapsed()
        );
    }
    Ok(())
}
