//! Class groups, characters and admissibility for a few discriminants.

use quadinter::classgroup::{admissibility_report, ClassGroup};

fn main() -> quadinter::Result<()> {
    for d in [-4i64, -20, -23, -47, -84] {
        let g = ClassGroup::new(d)?;
        let forms: Vec<String> = g.classes.iter().map(|f| f.to_string()).collect();
        println!("D = {d}: h = {}, invariants {:?}, genera {}, w = {}", g.h, g.invariants, g.h / g.squares().len(), g.w);
        println!("  classes {}", forms.join(" "));
        for chi in g.characters() {
            println!("  character of order {}: {:?}/{}", chi.order(), chi.numerators, chi.denominator);
        }
        let adm: Vec<i64> = (1..=30).filter(|&m| admissibility_report(m, &g).map(|r| r.admissible).unwrap_or(false)).collect();
        println!("  admissible m <= 30: {adm:?}");
    }
    Ok(())
}
