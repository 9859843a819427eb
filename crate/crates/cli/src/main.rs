fn main() {
    std::process::exit(fractx_cli::run(std::env::args_os()));
}
