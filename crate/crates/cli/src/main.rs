fn main() {
    std::process::exit(monocis_cli::main_with_args(std::env::args_os()));
}
