fn main() {
    if let Err(e) = dineq::cli::run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
