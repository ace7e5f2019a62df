fn main() {
    std::process::exit(halfline::cli::main_with_args(std::env::args_os()));
}
