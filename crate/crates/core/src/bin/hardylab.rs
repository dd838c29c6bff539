fn main() {
    std::process::exit(hardylab::cli::main_with_args(std::env::args_os()));
}
