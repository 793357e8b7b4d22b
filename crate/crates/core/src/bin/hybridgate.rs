fn main() {
    std::process::exit(hybridgate::cli::main_from(std::env::args_os()));
}
