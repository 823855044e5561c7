fn main() {
    std::process::exit(chainbound::cli::run(std::env::args_os()));
}
