fn main() {
    std::process::exit(qca_lab::cli::run(std::env::args_os()));
}
