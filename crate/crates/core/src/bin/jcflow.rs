fn main() {
    std::process::exit(jcflow::cli::main_with_args(std::env::args_os()));
}
