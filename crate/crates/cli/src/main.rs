fn main() {
    std::process::exit(tomosched_cli::run(std::env::args_os()));
}
