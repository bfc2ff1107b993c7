fn main() {
    std::process::exit(ultragh::cli::run(std::env::args_os()));
}
