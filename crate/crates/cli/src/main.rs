//! `revsym`: runs one experiment described by a TOML config.
//!
//! Exit status: 0 success, 1 unreadable or malformed config (or an I/O
//! failure), 2 validation failure, 3 falsification candidate.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use revsym_cli::config::{Command, Format};
use revsym_cli::run::{self, Outcome};

#[derive(Debug, Parser)]
#[command(name = "revsym", version, about = "Symmetric periodic orbits of reversible planar maps")]
struct Cli {
    /// Overrides the command named in the config.
    command: Option<Command>,
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.directory`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of json,csv,svg.
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<Format>>,
    /// Worker threads for the parallel parts.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    verbose: bool,
    /// Inclusive range of symmetry-line indices, e.g. `0..6`.
    #[arg(long, value_parser = parse_range)]
    m: Option<[u32; 2]>,
    #[arg(long)]
    qmax: Option<u32>,
    #[arg(long)]
    nmax: Option<u32>,
}

fn parse_range(s: &str) -> Result<[u32; 2], String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got `{s}`"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    Ok([a, b])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(1);
        }
    }
    let mut config = match run::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(c) = cli.command {
        config.command = c;
    }
    if let Some(dir) = cli.out {
        config.output.directory = dir;
    }
    if let Some(mut formats) = cli.format {
        formats.sort();
        formats.dedup();
        config.output.formats = formats;
    }
    if let Some(m) = cli.m {
        config.numeric.m = m;
    }
    if let Some(q) = cli.qmax {
        config.numeric.q_max = q;
    }
    if let Some(n) = cli.nmax {
        config.numeric.n_max = n;
    }
    match run::run(&config, cli.verbose) {
        Ok(outcome) => {
            match &outcome {
                Outcome::Success => {
                    if cli.verbose {
                        eprintln!("[revsym] done");
                    }
                }
                Outcome::Invalid(why) => eprintln!("validation failure: {why}"),
                Outcome::Falsified(items) => {
                    for i in items {
                        eprintln!("falsification candidate: {i}");
                    }
                }
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
