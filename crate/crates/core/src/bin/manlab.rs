fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(manlab_core::cli::run(&argv));
}
