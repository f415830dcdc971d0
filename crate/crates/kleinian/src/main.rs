use clap::Parser;
use kleinian::cli::{run, Cli, Outcome};
use kleinian::Error;

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => {}
        Ok(Outcome::Violation) => std::process::exit(1),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                // Failed combination hypotheses are verified violations.
                Error::Hypothesis { .. } => 1,
                _ => 2,
            };
            std::process::exit(code);
        }
    }
}
