fn main() {
    std::process::exit(subspec::cli::run(std::env::args_os()));
}
