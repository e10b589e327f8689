fn main() {
    std::process::exit(ilsmooth_cli::run(std::env::args_os()));
}
