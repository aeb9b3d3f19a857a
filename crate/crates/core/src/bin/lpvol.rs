fn main() {
    std::process::exit(lpvol::cli::run(std::env::args_os()));
}
