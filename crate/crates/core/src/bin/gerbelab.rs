fn main() {
    std::process::exit(gerbelab::cli::main());
}
