fn main() {
    std::process::exit(simplest_cubic::cli::main_with_env());
}
