mod commands;
mod config;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use commands::CliError;
use config::{Cli, Command, Format, RunConfig};

fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    match cli.command {
        Command::Run(args) => {
            let text = fs::read_to_string(&args.config)
                .map_err(|e| CliError::config(format!("cannot read {}: {e}", args.config.display())))?;
            let mut cfg = RunConfig::from_json(&text).map_err(CliError::config)?;
            // flags given on the command line win over the file for output routing
            if cli.common.output.is_some() {
                cfg.common.output = cli.common.output;
            }
            Ok(cfg)
        }
        command => Ok(RunConfig {
            command,
            common: cli.common,
        }),
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("BERGMAN_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::config(format!("BERGMAN_LAB_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(e.to_string()))
}

fn render(cfg: &RunConfig, o: &commands::Output) -> Result<String, CliError> {
    let config = serde_json::to_value(cfg).map_err(|e| CliError::numeric(e.to_string()))?;
    match cfg.common.format {
        Format::Json => {
            let doc = json!({ "config": config, "report": o.report });
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::numeric(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => Ok(format!("# config: {config}\n{}", o.table.to_csv())),
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    configure_threads()?;
    let cfg = resolve(cli)?;
    let o = commands::run(&cfg).map_err(|e| CliError {
        code: e.code,
        message: format!("{}: {}", cfg.command.name(), e.message),
    })?;
    let text = render(&cfg, &o)?;
    match &cfg.common.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::numeric(e.to_string()))?;
        }
    }
    Ok(o.status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
