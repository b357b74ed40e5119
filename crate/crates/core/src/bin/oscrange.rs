fn main() {
    std::process::exit(oscillation_ranging::harness::cli::run());
}
