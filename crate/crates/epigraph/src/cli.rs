//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage and configuration errors, 2 for
//! failures while running.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use epigraph_core::abc::{abc_smc, posterior_summary, resimulation_seed, EpidemicModel};
use epigraph_core::graph::Snapshot;
use epigraph_core::matching::{temporal_objective, MatchParams};
use epigraph_core::sim::{self, subdivision, Counts, Theta};

use crate::config::{ConfigError, RawConfig};
use crate::db::{load_contact_db, ContactDb};
use crate::export;

#[derive(Parser, Debug)]
#[command(
    name = "epigraph",
    version,
    about = "Epidemics on evolving contact graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate one epidemic and export its snapshots.
    Simulate(SimulateArgs),
    /// Fit the model to an observed snapshot sequence by ABC-SMC.
    Infer(InferArgs),
    /// Time-weighted matching distance between two snapshot directories.
    Match(MatchArgs),
}

#[derive(Args, Debug)]
pub struct ConfigArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides a configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Root seed of all randomness.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct InferArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Snapshot directory, or a directory with `vertices.csv` and
    /// `edges.csv`.
    #[arg(long)]
    pub observed: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct MatchArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    pub nu: f64,
    #[arg(long, default_value_t = 0.5)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.0)]
    pub xi: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Runtime(_) => 2,
        }
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(&a, out),
        Command::Infer(a) => infer(&a, out),
        Command::Match(a) => match_dirs(&a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn load_config(args: &ConfigArgs) -> Result<RawConfig, ConfigError> {
    let mut cfg = match &args.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    for o in &args.overrides {
        cfg.apply_override(o)?;
    }
    if let Some(seed) = args.seed {
        cfg.set("seed", &seed.to_string())?;
    }
    Ok(cfg)
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))
}

pub fn simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(&args.config)?;
    let sim_config = cfg.sim()?;
    let theta = cfg.theta()?;
    if theta.n_initial_infected > sim_config.population {
        return Err(
            ConfigError::Invalid("n_initial_infected exceeds the population".into()).into(),
        );
    }
    create_dir(&args.out)?;
    let traj = sim::run(&theta, &sim_config, None).map_err(runtime)?;
    export::export_trajectory(&args.out, &traj).map_err(runtime)?;
    std::fs::write(args.out.join("config.txt"), cfg.render()).map_err(runtime)?;
    let last = traj.counts.last().copied().unwrap_or_default();
    writeln!(
        out,
        "simulated to day {}: {} infective, {} detected ({} random, {} traced), {} events",
        export::format_day(traj.final_day),
        last.infective,
        last.removed,
        last.random,
        last.traced,
        traj.events.len()
    )
    .map_err(runtime)?;
    Ok(())
}

/// Observed snapshots on the configured days, or on the days of a snapshot
/// directory, together with the database they come from.
pub fn load_observed(dir: &Path, days: &[f64]) -> Result<(Vec<Snapshot>, ContactDb), CliError> {
    let vertices = dir.join("vertices.csv");
    let edges = dir.join("edges.csv");
    if vertices.exists() && edges.exists() {
        let db = load_contact_db(&vertices, &edges).map_err(runtime)?;
        return Ok((db.snapshots(days), db));
    }
    let snapshots = export::read_snapshots(dir).map_err(runtime)?;
    let db = snapshots
        .last()
        .map(ContactDb::from_snapshot)
        .unwrap_or_default();
    Ok((snapshots, db))
}

pub fn infer(args: &InferArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(&args.config)?;
    let mut sim_config = cfg.sim()?;
    let prior = cfg.prior()?;
    let abc_config = cfg.abc()?;
    let matching = cfg.matching()?;
    let omega = cfg.omega()?;
    let seed = sim_config.seed;

    let (observed, db) = load_observed(&args.observed, &sim_config.snapshot_days)?;
    if observed.is_empty() {
        return Err(CliError::Runtime("observed data has no snapshots".into()));
    }
    sim_config.snapshot_days = observed.iter().map(|s| s.day).collect();
    sim_config
        .validate()
        .map_err(|e| ConfigError::Invalid(format!("observed snapshot days: {e}")))?;
    let mut model = EpidemicModel::new(sim_config.clone(), observed, matching, omega)
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    if cfg.seed_from_observed()? {
        model = model.with_seed_network(db.snapshot(sim_config.start_day));
    }

    create_dir(&args.out)?;
    std::fs::write(args.out.join("config.txt"), cfg.render()).map_err(runtime)?;
    let outcome = abc_smc(&prior, &abc_config, &model, seed).map_err(runtime)?;
    export::write_diagnostics(&args.out, &outcome).map_err(runtime)?;
    export::write_particles(&args.out, &outcome).map_err(runtime)?;
    let (mean, sd) = posterior_summary(&outcome.population);
    export::write_posterior(&args.out, &mean, &sd, &prior).map_err(runtime)?;

    // resimulate every accepted particle once for the plotted curves
    let horizon = cfg.curve_horizon()?.unwrap_or(sim_config.horizon);
    let grid = subdivision(sim_config.start_day, horizon, cfg.curve_points()?);
    let mut curve_model = model.clone();
    curve_model.sim.horizon = horizon.max(sim_config.start_day);
    let mut curves = Vec::new();
    for (i, p) in outcome.population.iter().enumerate() {
        let traj = curve_model
            .simulate(&p.params, resimulation_seed(seed, i))
            .map_err(runtime)?;
        if let Some(traj) = traj {
            let counts: Vec<Counts> = grid.iter().map(|&d| traj.counts_at(d)).collect();
            curves.push((i, counts));
        }
    }
    export::write_curves(&args.out, &curves).map_err(runtime)?;

    let last = outcome.diagnostics.last();
    writeln!(
        out,
        "{} iterations, final epsilon {}, {}",
        outcome.diagnostics.len(),
        last.map_or(f64::NAN, |d| d.epsilon),
        if outcome.converged {
            "converged"
        } else {
            "stopped at max_iterations"
        }
    )
    .map_err(runtime)?;
    for (k, name) in Theta::NAMES.iter().enumerate() {
        writeln!(out, "{name}\t{}\t{}", mean[k], sd[k]).map_err(runtime)?;
    }
    Ok(())
}

pub fn match_dirs(args: &MatchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = MatchParams {
        nu: args.nu,
        xi: args.xi,
        ..MatchParams::default()
    };
    params
        .validate()
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    if !(args.omega > 0.0 && args.omega <= 1.0) {
        return Err(ConfigError::Invalid("omega must lie in (0, 1]".into()).into());
    }
    let a = export::read_snapshots(&args.a).map_err(runtime)?;
    let b = export::read_snapshots(&args.b).map_err(runtime)?;
    let result = temporal_objective(&a, &b, args.omega, &params).map_err(runtime)?;
    writeln!(out, "phi_pi\t{}", result.value).map_err(runtime)?;
    for (snap, phi) in a.iter().zip(&result.per_snapshot) {
        writeln!(out, "day\t{}\tphi\t{}", export::format_day(snap.day), phi).map_err(runtime)?;
    }
    Ok(())
}
