fn main() {
    std::process::exit(qwrw::cli::main());
}
