fn main() {
    std::process::exit(rtr_cli::run(std::env::args().collect()));
}
