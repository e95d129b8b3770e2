fn main() {
    std::process::exit(lderand::cli::run(std::env::args_os()));
}
