fn main() {
    std::process::exit(lddkit::cli::run(std::env::args_os()));
}
