fn main() {
    std::process::exit(regar::cli::run_cli(std::env::args_os()));
}
