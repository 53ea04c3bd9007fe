fn main() {
    std::process::exit(paltiling::cli::run(std::env::args_os()));
}
