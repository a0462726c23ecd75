fn main() {
    std::process::exit(pointwave::cli::run(std::env::args_os()));
}
