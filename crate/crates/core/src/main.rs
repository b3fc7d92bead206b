fn main() {
    std::process::exit(rsforge::cli::main_with_args(std::env::args_os()));
}
