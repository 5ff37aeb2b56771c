fn main() {
    std::process::exit(qptm::cli::run());
}
