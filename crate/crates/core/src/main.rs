fn main() {
    std::process::exit(hypermat::cli::run(std::env::args_os()));
}
