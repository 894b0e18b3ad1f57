fn main() {
    std::process::exit(fairdiv::io::cli::run(std::env::args_os()));
}
