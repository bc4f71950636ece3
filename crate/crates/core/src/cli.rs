//! `divsel` command-line entry point.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{Error, ErrorClass};
use crate::geo_graph::build_knn_graph;
use crate::manifest::{load_manifest, write_manifest, DatasetManifest, ManifestFormat};
use crate::selector::run_schedule;
use crate::simharness::{evaluate_selection, generate_trajectories, TrajectoryConfig};

/// Environment variable that overrides the configured seed (a `--seed` flag wins).
pub const SEED_ENV: &str = "DIVSEL_SEED";

#[derive(Debug, Parser)]
#[command(name = "divsel", version, about = "Diversity-based active-learning sample selection")]
pub struct Cli {
    /// Silence progress output on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Seed override; takes precedence over DIVSEL_SEED and the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a selection schedule on a manifest.
    Select(SelectArgs),
    /// Generate a synthetic manifest from a scenario file.
    Simulate(SimulateArgs),
    /// Run several configs on one manifest and tabulate coverage.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Jsonl,
}

impl From<FormatArg> for ManifestFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ManifestFormat::Csv,
            FormatArg::Jsonl => ManifestFormat::Jsonl,
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub config: PathBuf,
    /// Report JSON path; selected ids go next to it as `<stem>.ids.csv`.
    #[arg(long)]
    pub out: PathBuf,
    /// Manifest format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Write the KNN graph edge list (`i,j,w`) here.
    #[arg(long)]
    pub dump_graph: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, num_args = 1.., required = true)]
    pub configs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

/// A failure carrying the exit class it should produce.
#[derive(Debug)]
pub struct CliError {
    pub class: ErrorClass,
    pub error: Error,
}

impl CliError {
    fn new(class: ErrorClass, error: Error) -> Self {
        CliError { class, error }
    }

    pub fn to_json(&self) -> String {
        let mut body = json!({
            "kind": self.error.kind(),
            "class": self.class.name(),
            "exit_code": self.class.exit_code(),
            "message": self.error.to_string(),
        });
        if let Error::Config { field, .. } = &self.error {
            body["field"] = json!(field);
        }
        json!({ "error": body }).to_string()
    }
}

impl From<Error> for CliError {
    fn from(error: Error) -> Self {
        CliError::new(error.class(), error)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Path of the ids CSV written next to a report.
pub fn ids_path(report: &Path) -> PathBuf {
    report.with_extension("ids.csv")
}

/// Parses arguments, runs the command, and returns the process exit code.
/// Errors are printed to stderr as one JSON object.
pub fn run<I, T>(args: I, env_seed: Option<String>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let err = CliError::new(ErrorClass::Config, Error::config("arguments", e.to_string()));
                eprintln!("{}", err.to_json());
                return ErrorClass::Config.exit_code();
            }
            print!("{e}");
            return 0;
        }
    };
    match execute(&cli, env_seed) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.class.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, env_seed: Option<String>) -> CliResult<()> {
    let seed = resolve_seed(cli.seed, env_seed)?;
    match &cli.command {
        Command::Select(args) => cmd_select(args, seed),
        Command::Simulate(args) => cmd_simulate(args, seed),
        Command::Compare(args) => cmd_compare(args, seed),
    }
}

fn resolve_seed(flag: Option<u64>, env: Option<String>) -> CliResult<Option<u64>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::new(ErrorClass::Config, Error::config(SEED_ENV, format!("`{v}` is not an unsigned integer")))),
        None => Ok(None),
    }
}

fn load_config(path: &Path, seed: Option<u64>) -> CliResult<RunConfig> {
    let mut config = RunConfig::from_path(path).map_err(|e| CliError::new(ErrorClass::Config, e))?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(config)
}

fn load_input_manifest(path: &Path, format: Option<FormatArg>) -> CliResult<DatasetManifest> {
    let format = format.map_or_else(|| ManifestFormat::from_path(path), Into::into);
    load_manifest(path, format).map_err(|e| CliError::new(ErrorClass::Data, e))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::new(ErrorClass::Runtime, Error::io(path, e)))
}

pub fn cmd_select(args: &SelectArgs, seed: Option<u64>) -> CliResult<()> {
    let config = load_config(&args.config, seed)?;
    let manifest = load_input_manifest(&args.manifest, args.format)?;
    info!("loaded {} samples from {}", manifest.len(), args.manifest.display());
    if let Some(path) = &args.dump_graph {
        let graph = build_knn_graph(&manifest, config.k, config.large_constant, config.use_elevation)?;
        graph.write_edge_list(path)?;
    }
    let report = run_schedule(&manifest, &config)?;
    write_file(&args.out, &report.to_json())?;
    write_file(&ids_path(&args.out), &report.ids_csv())?;
    info!("selected {} frames, total cost {:.3}", report.total_frames, report.total_cost);
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs, seed: Option<u64>) -> CliResult<()> {
    let text = fs::read_to_string(&args.scenario)
        .map_err(|e| CliError::new(ErrorClass::Config, Error::config("scenario", format!("{}: {e}", args.scenario.display()))))?;
    let mut scenario = TrajectoryConfig::from_json(&text).map_err(|e| CliError::new(ErrorClass::Config, e))?;
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    let manifest = generate_trajectories(&scenario)?;
    let format = args.format.map_or_else(|| ManifestFormat::from_path(&args.out), Into::into);
    write_manifest(&manifest, &args.out, format).map_err(|e| CliError::new(ErrorClass::Runtime, e))?;
    info!("wrote {} samples to {}", manifest.len(), args.out.display());
    Ok(())
}

pub fn cmd_compare(args: &CompareArgs, seed: Option<u64>) -> CliResult<()> {
    let mut configs = Vec::with_capacity(args.configs.len());
    let mut labels = BTreeSet::new();
    for path in &args.configs {
        let config = load_config(path, seed)?;
        let label = config
            .label
            .clone()
            .unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
        if !labels.insert(label.clone()) {
            return Err(CliError::new(ErrorClass::Config, Error::config("label", format!("duplicate config label `{label}`"))));
        }
        configs.push((label, config));
    }
    let manifest = load_input_manifest(&args.manifest, args.format)?;
    let mut out = String::from("label,strategy,frames,boxes,cost,dispersion,stream_coverage\n");
    for (label, config) in &configs {
        let report = run_schedule(&manifest, config)?;
        let coverage = evaluate_selection(&manifest, &report.selected_ids())?;
        info!("{label}: {} frames, {} boxes", coverage.frames, coverage.boxes);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            label,
            config.strategy.name(),
            coverage.frames,
            coverage.boxes,
            report.total_cost,
            coverage.dispersion,
            coverage.stream_coverage
        );
    }
    write_file(&args.out, &out)
}
