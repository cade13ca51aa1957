fn main() {
    std::process::exit(netcompress::cli::run(std::env::args_os()));
}
