fn main() {
    std::process::exit(mdimp::cli::main_with(std::env::args_os()));
}
