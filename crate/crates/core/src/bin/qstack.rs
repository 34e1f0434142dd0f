fn main() {
    std::process::exit(qstack::cli::run(std::env::args_os()));
}
