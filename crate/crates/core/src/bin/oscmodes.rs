fn main() {
    std::process::exit(oscmodes::cli::run_cli(std::env::args_os()));
}
