fn main() {
    std::process::exit(hpm_core::cli::run(std::env::args_os()));
}
