mod commands;
mod input;
mod manifest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde::Serialize;

use manifest::{manifest_path, FileDigest, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "polyspread", version, about = "Angles, spreads, skyscrapers, roundings and waists of convex polytopes")]
struct Cli {
    /// write the primary artifact here, with a manifest beside it (stdout otherwise)
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// upper bound on worker threads; results do not depend on it
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// face counts, simplicity and diameters
    PolyInfo(commands::PolyInfo),
    /// complementary angles and coangles of faces of one dimension (CSV)
    Angles(commands::Angles),
    /// comb or angular distances in the edge graph
    Dist(commands::Dist),
    /// separation and degree of a given cube labeling (JSON)
    SpreadCertify(commands::SpreadCertify),
    /// best certified spread lower bound found by search (JSON)
    SpreadSearch(commands::SpreadSearch),
    /// build and verify one skyscraper (JSON)
    SkyscraperBuild(commands::SkyscraperBuild),
    /// angles of a skyscraper across vertical stretches (CSV)
    SkyscraperStudy(commands::SkyscraperStudy),
    /// mesh of the rounded boundary (text)
    Round(commands::Round),
    /// ♮-distance between two vertex sets of a rounding (JSON)
    Natdist(commands::Natdist),
    /// ♮-distance against angular distance as ε shrinks (CSV)
    NatConverge(commands::NatConverge),
    /// tangent polytopes of random sphere samples (CSV)
    RandomExperiment(commands::RandomExperiment),
    /// faces met by fibers of a linear map (CSV)
    Waist(commands::Waist),
}

#[derive(Debug)]
pub enum CliError {
    /// bad flags or unreadable input; exit status 2
    Usage(String),
    /// a module rejected the input; exit status 1
    Domain(String),
}

macro_rules! domain_errors {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain(e.to_string())
            }
        })*
    };
}

domain_errors!(
    polyspread::geometry::GeometryError,
    polyspread::dual_graph::GraphError,
    polyspread::spread::SpreadError,
    polyspread::skyscraper::SkyscraperError,
    polyspread::rounding::RoundingError,
    polyspread::random_poly::RandomError,
    polyspread::waists::WaistError
);

/// What a command hands back for writing.
pub struct Output {
    pub body: String,
    /// one line for stderr
    pub summary: Option<String>,
}

impl Command {
    fn name(&self) -> String {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(m)) => m.keys().next().cloned().unwrap_or_default(),
            _ => String::new(),
        }
    }

    fn config(&self) -> serde_json::Value {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(m)) => m.into_iter().next().map(|(_, v)| v).unwrap_or_default(),
            _ => serde_json::Value::Null,
        }
    }

    fn seed(&mut self) -> Option<&mut Option<u64>> {
        match self {
            Command::Angles(c) => Some(&mut c.seed),
            Command::SpreadCertify(c) => Some(&mut c.seed),
            Command::SpreadSearch(c) => Some(&mut c.seed),
            Command::RandomExperiment(c) if c.config.is_none() => Some(&mut c.seed),
            Command::Waist(c) => Some(&mut c.seed),
            _ => None,
        }
    }

    fn inputs(&self) -> Vec<PathBuf> {
        match self {
            Command::PolyInfo(c) => c.source.files(),
            Command::Angles(c) => c.source.files(),
            Command::Dist(c) => c.source.files(),
            Command::SpreadCertify(c) => {
                let mut f = c.source.files();
                if !["natural", "bands"].contains(&c.labeling.as_str()) {
                    f.push(PathBuf::from(&c.labeling));
                }
                f
            }
            Command::SpreadSearch(c) => c.source.files(),
            Command::SkyscraperBuild(c) => c.family.spec.iter().cloned().collect(),
            Command::SkyscraperStudy(c) => c.family.spec.iter().cloned().collect(),
            Command::Round(c) => c.source.files(),
            Command::Natdist(c) => c.source.files(),
            Command::NatConverge(c) => c.source.files(),
            Command::RandomExperiment(c) => c.config.iter().cloned().collect(),
            Command::Waist(c) => c.source.files(),
        }
    }

    fn run(&self) -> Result<Output, CliError> {
        match self {
            Command::PolyInfo(c) => c.run(),
            Command::Angles(c) => c.run(),
            Command::Dist(c) => c.run(),
            Command::SpreadCertify(c) => c.run(),
            Command::SpreadSearch(c) => c.run(),
            Command::SkyscraperBuild(c) => c.run(),
            Command::SkyscraperStudy(c) => c.run(),
            Command::Round(c) => c.run(),
            Command::Natdist(c) => c.run(),
            Command::NatConverge(c) => c.run(),
            Command::RandomExperiment(c) => c.run(),
            Command::Waist(c) => c.run(),
        }
    }
}

fn fresh_seed() -> u64 {
    let t = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
    t.as_nanos() as u64 ^ u64::from(std::process::id()).rotate_left(32)
}

fn execute(mut cli: Cli, mut args: Vec<String>) -> Result<(), CliError> {
    let started = Instant::now();
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let tolerance = input::default_tolerance()?;
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Usage("--workers: must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--workers: {e}")))?;
    }
    let mut seeds = Vec::new();
    if let Some(seed) = cli.command.seed() {
        let s = *seed.get_or_insert_with(|| {
            let s = fresh_seed();
            args.extend(["--seed".to_string(), s.to_string()]);
            s
        });
        seeds.push(s);
    }
    if let Command::RandomExperiment(c) = &cli.command {
        if let Some(path) = &c.config {
            let cfg: polyspread::random_poly::ExperimentConfig = input::read_json(path)?;
            seeds.push(cfg.seed);
        }
    }

    let out = cli.command.run()?;
    if let Some(s) = &out.summary {
        eprintln!("{s}");
    }
    let Some(path) = cli.out.take() else {
        std::io::stdout()
            .write_all(out.body.as_bytes())
            .map_err(|e| CliError::Usage(format!("stdout: {e}")))?;
        return Ok(());
    };
    std::fs::write(&path, &out.body).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    let manifest = RunManifest {
        command: cli.command.name(),
        args,
        config: cli.command.config(),
        seeds,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        tolerance,
        workers: cli.workers,
        inputs: cli.command.inputs().iter().map(|p| FileDigest::of(p)).collect::<Result<_, _>>()?,
        outputs: vec![FileDigest::of(&path)?],
        started_unix,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let mpath = manifest_path(&path);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&mpath, text + "\n").map_err(|e| CliError::Usage(format!("cannot write {}: {e}", mpath.display())))
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("polyspread: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(m)) => {
            eprintln!("polyspread: {m}");
            ExitCode::from(1)
        }
    }
}
