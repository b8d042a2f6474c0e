use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use toboggan_cli::{run, Cli, CliError};

fn write_out(text: &str, path: Option<&std::path::Path>) -> Result<(), CliError> {
    let io = |source, p: &str| CliError::Io {
        path: p.to_string(),
        source,
    };
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io(e, &p.display().to_string())),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| io(e, "stdout")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|(artifact, format, path)| write_out(artifact.render(format), path.as_deref()));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
