fn main() {
    std::process::exit(qsm::cli::run(std::env::args_os()));
}
