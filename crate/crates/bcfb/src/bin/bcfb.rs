fn main() {
    std::process::exit(bcfb::cli::main_with(std::env::args_os()));
}
