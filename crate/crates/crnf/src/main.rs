fn main() {
    std::process::exit(crnf::cli::main_with_args(std::env::args_os()));
}
