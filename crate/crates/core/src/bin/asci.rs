fn main() {
    std::process::exit(asci_prep::cli::main_with_args(std::env::args_os()));
}
