fn main() {
    std::process::exit(cdsc::cli::main_with_args(std::env::args_os()));
}
