use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use fluxion::config::{Experiment, RunConfig};
use fluxion::run::{run, RunError};

/// Information-flux experiments: Clifford cloners, spin chains, state transfer
/// and open-system decay.
#[derive(Parser, Debug)]
#[command(name = "fluxion", version)]
struct Cli {
    /// One of: table1, uqcm-circuit, uqcm-prep-opt, uqcm-chain,
    /// universality-scan, transfer-single, transfer-sweep, transfer-disorder,
    /// perfect-transfer, series-check, open-flux
    experiment: String,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads for grid and ensemble work.
    #[arg(long)]
    threads: Option<usize>,
}

fn config_error(lines: &[String]) -> ExitCode {
    eprintln!("invalid configuration:");
    for l in lines {
        eprintln!("  {l}");
    }
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let experiment: Experiment = match cli.experiment.parse() {
        Ok(e) => e,
        Err(msg) => return config_error(&[format!("experiment: {msg}")]),
    };
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => return config_error(&[format!("config: {}: {e}", cli.config.display())]),
    };
    let mut config = match RunConfig::parse(&text, Some(experiment)) {
        Ok(c) => c,
        Err(d) => return config_error(&d.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(k) = cli.threads {
        if k == 0 {
            return config_error(&["threads: must be at least 1".to_string()]);
        }
        #[cfg(feature = "parallel")]
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&config, &cli.out) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e @ RunError::Config(_)) => {
            eprint!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
