fn main() {
    std::process::exit(gencomb::cli::run(std::env::args_os()));
}
