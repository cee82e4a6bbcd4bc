fn main() {
    std::process::exit(fusion_recovery::cli::run(std::env::args_os()));
}
