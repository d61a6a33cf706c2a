fn main() {
    std::process::exit(dressed_cli::run(std::env::args_os()));
}
