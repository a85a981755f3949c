use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use aqss_cli::args::{expand_grid, Cli};
use aqss_cli::record::{write_csv, write_json};
use aqss_cli::{sweep, CliError, OutputFormat, ResultRecord};
use clap::Parser;

fn emit(records: &[ResultRecord], format: OutputFormat, out: impl Write) -> anyhow::Result<()> {
    match format {
        OutputFormat::Json => write_json(records, out),
        OutputFormat::Csv => write_csv(records, out),
    }
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let (command, flags) = cli.command.split();
    let grid = expand_grid(command, flags)?;
    let records = sweep(&grid)?;
    match &flags.output {
        Some(path) => {
            let file =
                File::create(path).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            emit(&records, flags.format, &mut w)?;
            w.flush().map_err(anyhow::Error::from)?;
        }
        None => emit(&records, flags.format, io::stdout().lock())?,
    }
    let mut ok = true;
    for r in &records {
        for m in r.metrics.iter().filter(|m| m.failed()) {
            ok = false;
            eprintln!(
                "bound violated: {} d={} n={} {} = {} > {}",
                r.command.name(),
                r.config.d,
                r.n_a,
                m.name,
                m.value,
                m.bound.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
