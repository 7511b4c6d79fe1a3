fn main() {
    std::process::exit(semmap_cli::run(std::env::args_os()));
}
