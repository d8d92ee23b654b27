fn main() {
    std::process::exit(relloc_cli::main_with(std::env::args_os()));
}
