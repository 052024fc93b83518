fn main() {
    std::process::exit(ising_gof::cli::run(std::env::args_os()));
}
