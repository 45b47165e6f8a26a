fn main() {
    std::process::exit(balcut::cli::run(std::env::args_os()));
}
