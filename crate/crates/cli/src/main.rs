fn main() {
    std::process::exit(qdisent_cli::run());
}
