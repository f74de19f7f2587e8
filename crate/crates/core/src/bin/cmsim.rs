fn main() {
    std::process::exit(cmsim::cli::run_cli(std::env::args_os()));
}
