fn main() {
    std::process::exit(priorlens::cli::run(std::env::args().collect()));
}
