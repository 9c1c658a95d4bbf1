fn main() {
    std::process::exit(finsite::cli::run(std::env::args_os()));
}
