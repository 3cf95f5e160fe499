fn main() {
    std::process::exit(gamma1_cli::run(std::env::args_os()));
}
