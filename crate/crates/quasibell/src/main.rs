fn main() {
    std::process::exit(quasibell::cli::run(std::env::args_os()));
}
