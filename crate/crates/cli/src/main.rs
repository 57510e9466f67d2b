use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use huygens::dynamics::{integrate, IntegrateOptions};
use huygens::io::{to_canonical_json, write_region_csv, write_trajectory_csv};
use huygens::regions::{region_map, summarize};
use huygens::spectral::spectrum_report;
use huygens::verify::{run_verify, Fault, VerifyOptions};
use huygens::{derived_constants, reduce_params, Escapement, Execution};
use serde::Serialize;

mod config;

use config::RunConfig;

#[derive(Parser)]
#[command(name = "huygens", version, about = "Two damped pendula on a spring-restrained sliding beam")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Where the main output goes; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Reduced parameters and derived constants as JSON.
    Reduce,
    /// Integrate the nonlinear system and write the trajectory CSV.
    Simulate,
    /// Characteristic polynomial, roots, stability and root localization.
    Spectrum,
    /// Classify a grid of the (X, Y) quadrant.
    Regions,
    /// Run the cross-module consistency checks.
    Verify {
        #[arg(long, hide = true)]
        inject_fault: Option<Fault>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] huygens::Error),
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use huygens::Error as E;
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::CrossCheck(_) => 5,
            CliError::Model(e) => match e {
                E::InvalidParam { .. } | E::InvalidGrid(_) | E::NotIdentical => 2,
                E::StepSizeUnderflow { .. } | E::MaxSteps { .. } | E::DegenerateState => 3,
                E::LeadingCoefficientZero
                | E::NonPositiveCoefficient { .. }
                | E::ZeroPivot
                | E::UnsupportedBranch { .. }
                | E::NotApplicable(_)
                | E::TooFewPeaks { .. } => 4,
            },
        }
    }
}

fn io_err(path: Option<&Path>, e: impl std::fmt::Display) -> CliError {
    match path {
        Some(p) => CliError::Io(format!("{}: {e}", p.display())),
        None => CliError::Io(e.to_string()),
    }
}

/// The main artifact goes to `out` or stdout; a summary then goes to
/// stdout if the artifact went to a file, or to stderr otherwise.
struct Sink {
    out: Option<PathBuf>,
}

impl Sink {
    fn artifact(&self, bytes: &[u8]) -> Result<(), CliError> {
        match &self.out {
            Some(p) => std::fs::write(p, bytes).map_err(|e| io_err(Some(p), e)),
            None => std::io::stdout().write_all(bytes).map_err(|e| io_err(None, e)),
        }
    }

    fn summary(&self, text: &str) {
        if self.out.is_some() {
            println!("{text}");
        } else {
            eprintln!("{text}");
        }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String, CliError> {
    to_canonical_json(v).map_err(|e| CliError::Io(e.to_string()))
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli.config.as_deref().ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    RunConfig::load(path)
}

fn reduce(cfg: &RunConfig, sink: &Sink) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Out {
        reduced: huygens::ReducedParams,
        derived: huygens::DerivedConstants,
    }
    let out = Out { reduced: reduce_params(&cfg.params)?, derived: derived_constants(&cfg.params)? };
    sink.artifact((json(&out)? + "\n").as_bytes())
}

fn simulate(cfg: &RunConfig, sink: &Sink) -> Result<(), CliError> {
    let opts = IntegrateOptions { samples: cfg.samples, ..IntegrateOptions::default() };
    let traj = integrate(&cfg.state(), &cfg.params, cfg.damping, &Escapement::none(), cfg.t_end, &opts)?;
    let mut buf = Vec::new();
    write_trajectory_csv(&traj, &mut buf).map_err(|e| io_err(None, e))?;
    sink.artifact(&buf)?;

    let e0 = traj.energies[0];
    let drift = traj.energies.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max);
    #[derive(Serialize)]
    struct Summary {
        samples: usize,
        accepted_steps: usize,
        rejected_steps: usize,
        energy_initial: f64,
        energy_final: f64,
        max_energy_drift_rel: Option<f64>,
        max_energy_rise_per_step: f64,
    }
    sink.summary(&json(&Summary {
        samples: traj.times.len(),
        accepted_steps: traj.stats.ode.accepted,
        rejected_steps: traj.stats.ode.rejected,
        energy_initial: e0,
        energy_final: *traj.energies.last().unwrap_or(&e0),
        max_energy_drift_rel: (e0 != 0.0).then(|| drift / e0.abs()),
        max_energy_rise_per_step: traj.stats.max_energy_rise,
    })?);
    Ok(())
}

fn spectrum(cfg: &RunConfig, sink: &Sink) -> Result<(), CliError> {
    let report = spectrum_report(&cfg.params, cfg.damping)?;
    sink.artifact((json(&report)? + "\n").as_bytes())?;
    let outside = report.annulus_violations(1e-9);
    if outside > 0 {
        return Err(CliError::CrossCheck(format!("{outside} roots outside the annulus")));
    }
    match report.ek_error {
        Some(msg) => Err(CliError::Model(huygens::Error::NotApplicable(format!("annulus: {msg}")))),
        None => Ok(()),
    }
}

fn regions(cfg: &RunConfig, sink: &Sink) -> Result<(), CliError> {
    let grid = cfg.grid.ok_or_else(|| CliError::Config("`grid` is required for regions".into()))?;
    let (eta, mu) = match cfg.quadrant {
        Some(q) => (q.eta, q.mu),
        None => {
            cfg.params.require_identical()?;
            let r = reduce_params(&cfg.params)?;
            (r.eta, r.mu)
        }
    };
    let map = region_map(&grid, eta, mu, Execution::Parallel)?;
    let mut buf = Vec::new();
    write_region_csv(&map, &mut buf).map_err(|e| io_err(None, e))?;
    sink.artifact(&buf)?;
    sink.summary(&json(&summarize(&map))?);
    Ok(())
}

fn verify(cfg: &RunConfig, sink: &Sink, fault: Option<Fault>) -> Result<(), CliError> {
    let opts = VerifyOptions { seed: cfg.seed, draws: cfg.draws, fault, ..VerifyOptions::default() };
    let start = Instant::now();
    let checks = run_verify(&opts)?;
    #[derive(Serialize)]
    struct Report<'a> {
        seed: u64,
        draws: usize,
        passed: bool,
        seconds: f64,
        checks: &'a [huygens::verify::CheckResult],
    }
    let passed = checks.iter().all(|c| c.passed);
    let report = Report { seed: cfg.seed, draws: cfg.draws, passed, seconds: start.elapsed().as_secs_f64(), checks: &checks };
    sink.artifact((json(&report)? + "\n").as_bytes())?;
    for c in &checks {
        eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if passed {
        Ok(())
    } else {
        let names: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        Err(CliError::CrossCheck(names.join(", ")))
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let cfg = load(cli)?;
    let sink = Sink { out: cli.out.clone().or_else(|| cfg.out.clone()) };
    match &cli.command {
        Command::Reduce => reduce(&cfg, &sink),
        Command::Simulate => simulate(&cfg, &sink),
        Command::Spectrum => spectrum(&cfg, &sink),
        Command::Regions => regions(&cfg, &sink),
        Command::Verify { inject_fault } => verify(&cfg, &sink, *inject_fault),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
