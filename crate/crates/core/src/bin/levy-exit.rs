fn main() {
    std::process::exit(levy_exit::cli::main_with_args(std::env::args_os()));
}
