//! Exact laws of the exponential sums at a few primes for the shipped model pair.

use quadinter::error::DEFAULT_BUDGET;
use quadinter::expsum::{verify_prime_laws, LawStatus};
use quadinter::quadform::RaryForm;

fn main() -> quadinter::Result<()> {
    let q1 = RaryForm::diagonal(&[1, 1, 1, 1]);
    let q2 = RaryForm::diagonal(&[-1, 1, 2, 3]);
    for (p, c, mvec) in [(3, 2, vec![1, 2, 0, 1]), (5, 2, vec![1, 2, 3, 1]), (7, 2, vec![2, 1, 3, 5])] {
        let rep = verify_prime_laws(p, c, 23, 1, -23, &mvec, &q1, &q2, DEFAULT_BUDGET)?;
        println!("p = {p}, mvec = {mvec:?}, Q2*(mvec) = {}, V smooth: {}, section smooth: {:?}",
            rep.q2_dual_at_mvec, rep.v_smooth_mod_p, rep.w_smooth_mod_p);
        for ch in &rep.checks {
            let v = ch.abs_value.map_or("-".to_string(), |v| format!("{v:.6e}"));
            let b = ch.bound.map_or("-".to_string(), |v| format!("{v:.6e}"));
            let s = match ch.status {
                LawStatus::Pass => "pass",
                LawStatus::Fail => "FAIL",
                LawStatus::Informational => "info",
                LawStatus::SkippedBudget => "skipped (budget)",
                LawStatus::NotApplicable => "n/a",
            };
            println!("  {:<12} q1={:<4} q2={:<4} |C| = {v:<14} bound = {b:<14} {s}", ch.law, ch.q1, ch.q2);
        }
    }
    Ok(())
}
