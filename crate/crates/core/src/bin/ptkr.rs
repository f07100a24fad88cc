use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ptkr::io::{error_record, parse_config_with, run_subcommand, Task};
use ptkr::Error;

/// PT-symmetric kicked rotor: OTOCs, norm growth and phase diagrams.
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    /// One of: evolve, otoc, phase-scan, lambda-c, fit, plot.
    subcommand: String,
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to `output.dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Shorthand for `--override schedule.t_max=N`.
    #[arg(long)]
    t_max: Option<usize>,
    /// `key=value`, applied after the config file. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn run(cli: &Cli) -> Result<(PathBuf, Vec<PathBuf>), (Option<PathBuf>, Error)> {
    let task: Task = cli.subcommand.parse().map_err(|e| (None, e))?;
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| (None, Error::Io { path: cli.config.display().to_string(), message: e.to_string() }))?;
    let mut overrides = Vec::new();
    for o in &cli.overrides {
        let (k, v) = o.split_once('=').ok_or_else(|| {
            (None, Error::ConfigSyntax { line: 0, message: format!("override `{o}` is not key=value") })
        })?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(t) = cli.t_max {
        overrides.push(("schedule.t_max".into(), t.to_string()));
    }
    let cfg = parse_config_with(&text, &overrides).map_err(|e| (None, e))?;
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    match run_subcommand(task, &cfg, &out) {
        Ok(r) => Ok((out, r.files)),
        Err(e) => Err((Some(out), e)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((_, files)) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err((out, err)) => {
            let record = error_record(&err);
            eprintln!("{record}");
            if let Some(dir) = out.or_else(|| cli.out.clone()) {
                if std::fs::create_dir_all(&dir).is_ok() {
                    let _ = std::fs::write(dir.join("error.json"), format!("{record:#}\n"));
                }
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
