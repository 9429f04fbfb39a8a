use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hk_cli::run;

/// Batch verifier for the calculus of homogeneous vector fields: ingest a
/// declarative config (family, dilation, functional, function, domain,
/// checks), run the checks, and emit JSON reports plus a summary.
#[derive(Parser)]
#[command(name = "hk", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the checks described by a config file.
    Run {
        /// Path to the config.
        config: PathBuf,
        /// Directory for report files (default: next to the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the family, functional and domain presets.
    ListPresets,
    /// Explain what a check verifies.
    Explain {
        /// One of: h1, h2, star-shaped, poho1, poho-pde, poho2,
        /// boundary-id2, audit1, audit2.
        check: String,
    },
}

fn configure_threads() -> Result<(), String> {
    match std::env::var("HK_THREADS") {
        Err(_) => Ok(()),
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| format!("HK_THREADS must be a positive integer, got `{v}`"))?;
            if n == 0 {
                return Err("HK_THREADS must be at least 1".into());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| e.to_string())
        }
    }
}

fn main() -> ExitCode {
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run { config, out } => match run::run_config_file(&config, out.as_deref()) {
            Ok(code) => ExitCode::from(code as u8),
            Err(e) => {
                eprintln!("error: {}", e.message());
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Cmd::ListPresets => {
            print!("{}", hk_cli::presets::list_presets());
            ExitCode::SUCCESS
        }
        Cmd::Explain { check } => match run::explain(&check) {
            Some(text) => {
                println!("{text}");
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("error: unknown check `{check}`; try one of h1, h2, star-shaped, poho1, poho-pde, poho2, boundary-id2, audit1, audit2");
                ExitCode::from(2)
            }
        },
    }
}
