fn main() {
    std::process::exit(qsl2r::cli::main_with_args(std::env::args_os()));
}
