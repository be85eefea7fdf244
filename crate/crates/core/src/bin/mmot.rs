fn main() {
    let code = mmot_geometry::cli::run(std::env::args().collect(), &mut std::io::stdout().lock(), &mut std::io::stderr());
    std::process::exit(code);
}
