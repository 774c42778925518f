fn main() {
    if let Err(e) = qcorr::cli::run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code().into());
    }
}
