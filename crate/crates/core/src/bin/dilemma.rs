fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(dilemma_core::cli::run(&argv));
}
