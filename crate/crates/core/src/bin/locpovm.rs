fn main() {
    std::process::exit(locpovm::cli::main_with_args(std::env::args_os()));
}
