fn main() {
    std::process::exit(partial_online::cli::main_with_args(std::env::args_os()));
}
