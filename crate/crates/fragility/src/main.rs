use clap::error::ErrorKind;
use clap::Parser;
use fragility::cli::{run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are validation errors
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            std::process::exit(code);
        }
    };
    if let Err(failure) = run(cli) {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}
