fn main() {
    std::process::exit(quadinter::cli::run(std::env::args_os()));
}
