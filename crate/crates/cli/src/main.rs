fn main() {
    std::process::exit(watchtower_cli::run(std::env::args_os()));
}
