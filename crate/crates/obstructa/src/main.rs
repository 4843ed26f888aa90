fn main() {
    std::process::exit(obstructa::cli::run(std::env::args_os()));
}
