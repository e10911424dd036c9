fn main() {
    std::process::exit(pmica::cli::run(std::env::args_os()));
}
