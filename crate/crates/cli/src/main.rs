fn main() {
    std::process::exit(swapval_cli::run_cli(std::env::args_os()));
}
