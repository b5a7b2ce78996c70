//! `gapscope`: runs spectral-gap experiments and the verification suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or config error,
//! 3 solver failure.

mod config;
mod experiments;
mod plot;
mod table;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use config::{ExperimentConfig, Settings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    fn from_core(e: gapscope::Error) -> Self {
        fn is_input(e: &gapscope::Error) -> bool {
            match e {
                gapscope::Error::Validation(_) | gapscope::Error::Argument(_) => true,
                gapscope::Error::AtInstance { source, .. } => is_input(source),
                _ => false,
            }
        }
        if is_input(&e) {
            CliError::Usage(e.to_string())
        } else {
            CliError::Solver(e.to_string())
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

/// Settings from `--config` are overridden by flags.
#[derive(Debug, Parser)]
#[command(name = "gapscope", version, about = "Spectral gaps of weighted path graphs with a point potential")]
struct Args {
    /// Spectrum | GapScaling | FitExponent | GroundState | Verify
    #[arg(long)]
    experiment: Option<String>,
    /// Single half-size k (N = 2k+1)
    #[arg(long)]
    k: Option<String>,
    /// k0:ratio:count or a comma-separated list
    #[arg(long = "k-grid")]
    k_grid: Option<String>,
    #[arg(long)]
    u: Option<String>,
    /// unit | powerlaw | explicit
    #[arg(long)]
    weights: Option<String>,
    /// Power-law constant
    #[arg(long = "C")]
    c: Option<String>,
    /// Power-law exponent
    #[arg(long)]
    mu: Option<String>,
    /// Edge weights for weights=explicit
    #[arg(long = "weights-file")]
    weights_file: Option<String>,
    /// Absolute bisection tolerance
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    /// SVG output (GapScaling)
    #[arg(long)]
    plot: Option<String>,
    /// Fitted quantity (FitExponent): gap, n2gap, n2lambda0, n2lambda1, n_u0_center, n2mu0
    #[arg(long)]
    quantity: Option<String>,
    /// Nmin:Nmax (FitExponent)
    #[arg(long = "fit-window")]
    fit_window: Option<String>,
    /// RNG seed (Verify)
    #[arg(long)]
    seed: Option<String>,
    #[arg(long = "oracle-instances")]
    oracle_instances: Option<String>,
    #[arg(long = "structure-instances")]
    structure_instances: Option<String>,
    /// Flat key=value file
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Args {
    fn settings(&self) -> Result<Settings, CliError> {
        let mut s = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        let flags = [
            ("experiment", &self.experiment),
            ("k", &self.k),
            ("k_grid", &self.k_grid),
            ("u", &self.u),
            ("weights", &self.weights),
            ("C", &self.c),
            ("mu", &self.mu),
            ("weights_file", &self.weights_file),
            ("tol", &self.tol),
            ("out", &self.out),
            ("format", &self.format),
            ("plot", &self.plot),
            ("quantity", &self.quantity),
            ("fit_window", &self.fit_window),
            ("seed", &self.seed),
            ("oracle_instances", &self.oracle_instances),
            ("structure_instances", &self.structure_instances),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                s.set(key, v);
            }
        }
        Ok(s)
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("GAPSCOPE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("GAPSCOPE_THREADS must be a non-negative integer, got `{raw}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("GAPSCOPE_THREADS: {e}")))?;
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn run(args: &Args) -> Result<u8, CliError> {
    let cfg: ExperimentConfig = args.settings()?.resolve()?;
    configure_threads()?;
    let report = experiments::run(&cfg)?;

    let rendered = report.table.render(cfg.format);
    let mut stdout = std::io::stdout().lock();
    match &cfg.out {
        Some(path) => {
            write_file(path, &rendered)?;
            for line in &report.notes {
                let _ = writeln!(stdout, "{line}");
            }
        }
        None if cfg.experiment == config::Experiment::Verify => {
            for line in &report.notes {
                let _ = writeln!(stdout, "{line}");
            }
        }
        None => {
            // notes go to stderr so stdout stays parseable
            let _ = stdout.write_all(rendered.as_bytes());
            for line in &report.notes {
                eprintln!("{line}");
            }
        }
    }
    if let (Some(path), Some(svg)) = (&cfg.plot, &report.svg) {
        write_file(path, svg)?;
    }
    Ok(if report.verify_failed { 1 } else { 0 })
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
