#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cli;

use clap::error::ErrorKind;
use clap::Parser;

fn main() {
    let parsed = match cli::Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => cli::EXIT_OK,
                _ => cli::EXIT_INPUT,
            };
            std::process::exit(code);
        }
    };
    std::process::exit(cli::run(parsed));
}
