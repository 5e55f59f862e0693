fn main() {
    std::process::exit(esc_toolkit::cli::main_with_args(std::env::args_os()));
}
