use std::io;
use std::process::ExitCode;

use clap::Parser;
use tql_cli::{run, Args, RunConfig};

fn main() -> ExitCode {
    let cfg = RunConfig::from(Args::parse());
    ExitCode::from(run(
        &cfg,
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    ))
}
