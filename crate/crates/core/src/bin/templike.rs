fn main() {
    std::process::exit(templike::cli::main_with_args(std::env::args_os()));
}
