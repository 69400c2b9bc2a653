fn main() {
    std::process::exit(apset::cli::run(std::env::args_os()));
}
