fn main() {
    std::process::exit(stabiliq::cli::run(std::env::args_os()));
}
