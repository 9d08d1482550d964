fn main() {
    std::process::exit(buildings::cli::run_and_print(std::env::args()));
}
