use clap::Parser;

use conicband::cli::{self, Cli};

fn main() {
    let cli = Cli::parse(); // exits with code 2 on flag errors
    let code = match cli::run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            cli::exit_code_for(&err)
        }
    };
    std::process::exit(code);
}
