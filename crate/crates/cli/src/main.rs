fn main() {
    std::process::exit(suq2_cli::run_from_args(std::env::args_os()));
}
