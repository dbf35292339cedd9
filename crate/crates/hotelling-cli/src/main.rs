fn main() {
    std::process::exit(hotelling_cli::main_with_args(std::env::args_os()));
}
