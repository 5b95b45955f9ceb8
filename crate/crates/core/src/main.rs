fn main() {
    std::process::exit(sonine::cli::run(std::env::args_os()));
}
