fn main() {
    std::process::exit(murmur_cli::main_with(std::env::args_os()));
}
