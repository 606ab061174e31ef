use clap::error::ErrorKind;
use clap::Parser;
use toeplitz_roots::cli::{error_json, run, Cli};
use toeplitz_roots::Error;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let err = Error::Input(e.kind().to_string());
            println!("{:#}", error_json(&err));
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    let (out, code) = run(&cli);
    print!("{out}");
    std::process::exit(code);
}
