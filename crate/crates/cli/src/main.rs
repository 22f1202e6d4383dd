fn main() {
    std::process::exit(llp_cli::main_with_args(std::env::args_os()));
}
