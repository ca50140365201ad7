fn main() {
    std::process::exit(chargeflow::cli::main_with_args(std::env::args_os()));
}
