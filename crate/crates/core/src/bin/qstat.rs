fn main() {
    std::process::exit(qorderstats::cli::main());
}
