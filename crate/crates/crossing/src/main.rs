use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use crossing::{run, Cli, CliError, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = io::BufWriter::new(stdout.lock());
    let mut err = stderr.lock();
    let result = RunConfig::from_cli(&cli).and_then(|config| run(&config, &mut out, &mut err));
    let flushed = out.flush().map_err(CliError::from);
    match result.and(flushed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
