use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ggwpd::experiment::{
    emit_csv, emit_report, find_branches, manifold_curves, run_sweep, ExperimentConfig, PRESETS,
};
use ggwpd::Error;

/// Kicked-rotor wave packet experiments: quantum, off-center and complex
/// saddle-point correlations.
#[derive(Parser)]
#[command(name = "ggwpd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an hbar sweep, writing <out>/<name>.csv and <out>/<name>-report.txt.
    Sweep(Scenario),
    /// Find the seeds and complex saddles of a scenario and print them.
    Saddle {
        #[command(flatten)]
        scenario: Scenario,
        /// Hilbert-space dimension for the packet widths (defaults to the smallest of N_list).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Dump the phase-space curves used by the seed search as CSV.
    Manifolds {
        #[command(flatten)]
        scenario: Scenario,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Args)]
struct Scenario {
    /// JSON configuration file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario: integrable-fig2 or chaotic-fig6.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Newton residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Largest torus winding searched for branches.
    #[arg(long)]
    image_range: Option<i64>,
}

impl Scenario {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        let mut config = match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentConfig::from_json_file(path)?,
            (None, Some(name)) => ExperimentConfig::preset(name)?,
            (None, None) => {
                return Err(Error::Config(format!("pass --config <path> or --preset <{}>", PRESETS.join("|"))))
            }
        };
        if let Some(tol) = self.tol {
            config.tol = tol;
        }
        if let Some(max_iter) = self.max_iter {
            config.max_iter = max_iter;
        }
        if let Some(range) = self.image_range {
            config.image_range = range;
        }
        config.validate()?;
        Ok(config)
    }

    fn stem(config: &ExperimentConfig) -> &str {
        if config.name.is_empty() {
            "sweep"
        } else {
            &config.name
        }
    }
}

enum Failure {
    Acceptance,
    Usage(Error),
    Numerical(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Io { .. } | Error::Csv { .. } | Error::Json(_) | Error::InvalidArgument(_) => {
                Failure::Usage(e)
            }
            _ => Failure::Numerical(e),
        }
    }
}

fn out_dir(path: &Path) -> Result<(), Error> {
    fs::create_dir_all(path).map_err(|source| Error::Io { path: path.into(), source })
}

fn sweep(scenario: &Scenario) -> Result<(), Failure> {
    let config = scenario.load()?;
    out_dir(&scenario.out)?;
    let outcome = run_sweep(&config)?;
    let stem = Scenario::stem(&config);
    let csv = scenario.out.join(format!("{stem}.csv"));
    emit_csv(&outcome.rows, &csv)?;
    let report = emit_report(&outcome);
    let report_path = scenario.out.join(format!("{stem}-report.txt"));
    fs::write(&report_path, &report.text).map_err(|source| Error::Io { path: report_path.clone(), source })?;
    print!("{}", report.text);
    println!("\nwrote {} and {}", csv.display(), report_path.display());
    if let Some(f) = &outcome.failure {
        return Err(Failure::Numerical(Error::Config(f.clone())));
    }
    if !report.all_pass() {
        return Err(Failure::Acceptance);
    }
    Ok(())
}

fn smallest_n(config: &ExperimentConfig, n: Option<usize>) -> Result<usize, Error> {
    match n.or_else(|| config.n_list.iter().copied().min()) {
        Some(n) if n >= 2 => Ok(n),
        Some(n) => Err(Error::Config(format!("N must be >= 2, got {n}"))),
        None => Err(Error::Config("N_list is empty; pass --n".into())),
    }
}

fn saddle(scenario: &Scenario, n: Option<usize>) -> Result<(), Failure> {
    let config = scenario.load()?;
    let n = smallest_n(&config, n)?;
    let (seeds, saddles) = find_branches(&config, n)?;
    println!("{} branch(es) at N = {n}", seeds.len());
    for s in &saddles {
        let z = s.initial();
        println!(
            "seed ({:+.10}, {:+.10}) winding ({}, {}) -> P0 = {:+.10}{:+.10}i  Q0 = {:+.10}{:+.10}i  ({} iterations, residual {:.1e})",
            s.seed.ic.0,
            s.seed.ic.1,
            s.seed.winding.n_p,
            s.seed.winding.n_q,
            z.p[0].re,
            z.p[0].im,
            z.q[0].re,
            z.q[0].im,
            s.iterations,
            s.residual_norm
        );
    }
    Ok(())
}

fn manifolds(scenario: &Scenario, n: Option<usize>) -> Result<(), Failure> {
    let config = scenario.load()?;
    let n = smallest_n(&config, n)?;
    out_dir(&scenario.out)?;
    let stem = Scenario::stem(&config);
    for (name, curve) in manifold_curves(&config, n)? {
        let path = scenario.out.join(format!("{stem}-{name}.csv"));
        curve.write_csv(&path)?;
        println!("wrote {} ({} points)", path.display(), curve.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(s) => sweep(s),
        Command::Saddle { scenario, n } => saddle(scenario, *n),
        Command::Manifolds { scenario, n } => manifolds(scenario, *n),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Acceptance) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(3)
        }
    }
}
