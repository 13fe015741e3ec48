fn main() {
    std::process::exit(jamrx::cli::run(std::env::args_os()));
}
