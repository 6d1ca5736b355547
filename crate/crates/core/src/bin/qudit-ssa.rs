fn main() {
    std::process::exit(qudit_ssa::cli::main_with_args(std::env::args().collect()));
}
