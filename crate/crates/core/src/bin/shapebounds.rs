fn main() {
    std::process::exit(shapebounds::cli::run());
}
