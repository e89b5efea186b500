fn main() {
    std::process::exit(algebraic_locality::cli::main_with_args(std::env::args_os()));
}
