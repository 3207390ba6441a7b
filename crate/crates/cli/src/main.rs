fn main() {
    std::process::exit(inlm_cli::run(std::env::args_os()));
}
