fn main() {
    std::process::exit(kdecomp::cli::main_with_args(std::env::args_os()));
}
