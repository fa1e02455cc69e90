fn main() {
    std::process::exit(renyi_core::cli::main());
}
