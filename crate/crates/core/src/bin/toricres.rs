fn main() {
    std::process::exit(toricres::cli::main_with_args(std::env::args_os()));
}
