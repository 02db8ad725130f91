fn main() {
    std::process::exit(transportq::cli::run_cli(std::env::args_os()));
}
