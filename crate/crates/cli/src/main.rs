fn main() {
    std::process::exit(quasigray_cli::run_cli(std::env::args_os()));
}
