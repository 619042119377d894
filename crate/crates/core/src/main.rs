fn main() {
    std::process::exit(semifix::cli::run(std::env::args_os()));
}
