fn main() {
    std::process::exit(unitarize::cli::run_command(std::env::args_os()));
}
