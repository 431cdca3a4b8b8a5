use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mforce_cli::{configure_threads, resolve, run, ConfigFile, Overrides, ScenarioKind};

/// Write mean-force thermodynamics data series as CSV.
///
/// Settings come from an optional JSON config; the flags below override it.
/// Set MFORCE_THREADS to cap the number of worker threads.
#[derive(Debug, Parser)]
#[command(name = "mforce", version)]
struct Args {
    /// JSON scenario configuration.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    scenario: Option<ScenarioKind>,
    /// Coupling κ; replaces any κ sweep.
    #[arg(long)]
    kappa: Option<f64>,
    /// Inverse temperature β; replaces any β sweep.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = (|| {
        configure_threads()?;
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let ov =
            Overrides { scenario: args.scenario, kappa: args.kappa, beta: args.beta, t_max: args.t_max, out: args.out };
        let (cfg, defaults) = resolve(file, &ov)?;
        let manifest = run(&cfg, &defaults)?;
        for f in &manifest.outputs {
            println!("{}", cfg.output_path.join(f).display());
        }
        Ok::<_, mforce_cli::CliError>(())
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
