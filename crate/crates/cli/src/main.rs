fn main() {
    std::process::exit(daf_cli::run(std::env::args_os()));
}
