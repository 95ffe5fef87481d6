fn main() {
    std::process::exit(retract_iter::cli::run(std::env::args_os()).code());
}
