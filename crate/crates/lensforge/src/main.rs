fn main() {
    std::process::exit(lensforge::cli::run());
}
