use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use ring_elect_cli::{execute, BenchSpec};

fn main() -> ExitCode {
    // clap prints its own usage message and exits 2 on flag errors.
    let spec = BenchSpec::parse();
    let stdout = std::io::stdout();
    match execute(&spec, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let mut stderr = std::io::stderr().lock();
            let _ = writeln!(stderr, "error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
