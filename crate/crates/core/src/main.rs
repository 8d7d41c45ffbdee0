fn main() {
    std::process::exit(currentlab::cli::run(std::env::args_os()));
}
