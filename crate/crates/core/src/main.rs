fn main() {
    std::process::exit(smallfock::cli::main_with_args(std::env::args_os()));
}
