fn main() {
    std::process::exit(indexsim::cli::main());
}
