fn main() {
    std::process::exit(pdnet::cli::run_cli(std::env::args_os()));
}
