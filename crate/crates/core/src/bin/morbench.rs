fn main() {
    std::process::exit(morbench::cli::run_cli(std::env::args_os()));
}
