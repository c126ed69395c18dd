fn main() {
    std::process::exit(projex::cli::run(std::env::args_os()));
}
