fn main() {
    std::process::exit(finsleroid::cli::run(std::env::args_os()));
}
