fn main() {
    std::process::exit(srgen::cli::run(std::env::args_os()));
}
