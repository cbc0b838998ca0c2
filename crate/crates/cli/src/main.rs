fn main() {
    std::process::exit(thermovqa_cli::run(std::env::args_os()));
}
