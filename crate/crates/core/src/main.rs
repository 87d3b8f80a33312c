fn main() {
    std::process::exit(logcave::cli::run(std::env::args_os()));
}
