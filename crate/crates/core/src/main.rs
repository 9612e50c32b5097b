use clap::Parser;
use wiretap_cc::cli::{configure_threads, run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(f) = configure_threads().and_then(|_| run(cli)) {
        eprintln!("wiretap-cc: {}", f.message);
        std::process::exit(f.code);
    }
}
