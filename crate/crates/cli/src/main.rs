fn main() {
    std::process::exit(radflow_cli::run(std::env::args_os()));
}
