use clap::Parser;
use erasure_lab::cli::{run, Cli};
use erasure_lab::Error;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("erasure-lab: {e}");
        let code = match e {
            Error::Usage(_) | Error::Config(_) => 2,
            _ => 1,
        };
        std::process::exit(code);
    }
}
