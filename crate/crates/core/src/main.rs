fn main() {
    std::process::exit(octa_euler::cli::main_with_args(std::env::args_os()));
}
