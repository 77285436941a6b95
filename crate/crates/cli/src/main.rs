fn main() {
    std::process::exit(primelab_cli::main_with_args(std::env::args_os()));
}
