fn main() {
    std::process::exit(extremal_kit::cli::run_from(std::env::args_os()));
}
