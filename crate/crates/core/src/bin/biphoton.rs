fn main() {
    std::process::exit(biphoton::cli::main_with_args(std::env::args_os()));
}
