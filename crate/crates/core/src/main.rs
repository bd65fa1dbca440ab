fn main() {
    std::process::exit(energylab::cli::main());
}
