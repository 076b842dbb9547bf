fn main() {
    std::process::exit(moderf::cli::main());
}
