fn main() {
    std::process::exit(polsphere::cli::main_with_args(std::env::args_os()));
}
