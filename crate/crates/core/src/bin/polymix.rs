fn main() {
    std::process::exit(polymix::cli::main_with(std::env::args_os()));
}
