fn main() {
    std::process::exit(iwasawa::cli::run(std::env::args_os()));
}
