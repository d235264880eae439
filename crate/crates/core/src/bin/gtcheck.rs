fn main() {
    std::process::exit(gtcheck_core::cli::run());
}
