fn main() {
    std::process::exit(nhqc_cli::run(std::env::args()));
}
