fn main() {
    std::process::exit(padua_core::cli::main_with_args(std::env::args_os()));
}
