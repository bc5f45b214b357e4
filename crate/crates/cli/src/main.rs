fn main() {
    std::process::exit(lhuilier_cli::run(std::env::args_os()));
}
