fn main() {
    std::process::exit(qsg_cli::main_with(std::env::args_os()));
}
