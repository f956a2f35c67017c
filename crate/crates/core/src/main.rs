fn main() {
    std::process::exit(nilmix::cli::run(std::env::args_os()));
}
