fn main() {
    std::process::exit(ust_graphon::cli::main_with_args(std::env::args_os()));
}
