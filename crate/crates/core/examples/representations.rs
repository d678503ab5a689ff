//! Representation numbers of x^2 + xy + 6y^2 split into Eisenstein and cusp parts.

use quadinter::repnum::RepEngine;

fn main() -> quadinter::Result<()> {
    let engine = RepEngine::for_discriminant(-23)?;
    println!("{:>4} {:>6} {:>12} {:>12}", "m", "r_F", "eisenstein", "cuspidal");
    for m in 1..=30 {
        let d = engine.decompose(m)?;
        println!("{m:>4} {:>6} {:>12.6} {:>12.6}", d.total, d.eisenstein, d.cuspidal.re);
    }
    Ok(())
}
