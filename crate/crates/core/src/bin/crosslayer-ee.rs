fn main() {
    std::process::exit(crosslayer_ee::cli::run(std::env::args_os()));
}
