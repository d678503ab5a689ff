//! Runs the full acceptance suite and prints one line per criterion.

fn main() {
    for r in quadinter::acceptance::run_all(1) {
        println!("{}", r.line());
    }
}
