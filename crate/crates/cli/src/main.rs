fn main() {
    std::process::exit(twopage_cli::run_cli(std::env::args_os()));
}
