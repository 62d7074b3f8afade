fn main() {
    std::process::exit(siegel_bergman::cli::main_with_args(std::env::args_os()));
}
