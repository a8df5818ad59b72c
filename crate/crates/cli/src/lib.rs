//! Command-line front end: instance banks, sweeps, spectra and reports.
//!
//! Every command writes RFC 4180 CSV with a header row and a JSON sidecar
//! holding the full configuration, so each row can be regenerated from its
//! seeds. Rows are sorted by key regardless of completion order.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use nppqo::experiment::{
    aggregate, efficiency_table, generate_bank, min_depths, run_spectra, run_sweep, sort_records, ExperimentConfig,
    RunRecord, SpectraRecord, CODE_VERSION, SUCCESS_THRESHOLD,
};
use nppqo::instances::{load_instances, save_instances, NppInstance};
use nppqo::Algorithm;
use serde::Serialize;

pub mod rows;

use rows::{AggregateCsv, EfficiencyCsv, MinDepthCsv, RunCsv, ScatterCsv, SpectraCsv};

/// Grids coarser than this trigger a convergence warning.
pub const GRID_WARN_BELOW: usize = 51;

#[derive(Debug, Parser)]
#[command(name = "nppqo", version, about = "Annealing and QAOA experiments on number partitioning")]
pub struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded instance bank.
    Gen(GenArgs),
    /// Run one algorithm over a bank and write per-run and aggregate tables.
    Run(RunArgs),
    /// Relevant gaps and quasi-optimal counts for three drive settings.
    Spectra(SpectraArgs),
    /// Aggregate existing run tables: means, minimal depths, efficiency ratios.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Sizes as a list and/or ranges, e.g. `6-10` or `6,8,10`.
    #[arg(long, default_value = "6-10")]
    pub sizes: String,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Output bank file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Clone)]
pub struct SweepArgs {
    /// Instance bank; generated from `--sizes/--count/--seed` when absent.
    #[arg(long)]
    pub bank: Option<PathBuf>,
    #[arg(long, default_value = "6-10")]
    pub sizes: String,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Annealing time.
    #[arg(long = "T", default_value_t = 50.0)]
    pub total_time: f64,
    /// Sine cutoff of the variational path.
    #[arg(long = "C", default_value_t = 6)]
    pub cutoff: usize,
    /// Override the per-algorithm restart count.
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Multiply restart counts (e.g. 0.05 for smoke runs).
    #[arg(long, default_value_t = 1.0)]
    pub budget: f64,
    /// Objective evaluations allowed per restart.
    #[arg(long, default_value_t = 2000)]
    pub max_eval: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub algo: Algorithm,
    #[arg(long, default_value_t = 1)]
    pub p_min: usize,
    #[arg(long, default_value_t = 10)]
    pub p_max: usize,
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Debug, Args)]
pub struct SpectraArgs {
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 201)]
    pub grid_points: usize,
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory holding `runs-*.csv`; reports are written next to them.
    #[arg(long)]
    pub out: PathBuf,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable bank, invalid configuration: exit 2.
    Config(anyhow::Error),
    /// Anything else that stops the command: exit 1.
    Runtime(anyhow::Error),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) | Failure::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Some rows carry an error: exit 3.
    Partial,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Partial => 3,
        }
    }
}

fn config_err<T>(r: anyhow::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Config)
}

fn runtime_err<T>(r: anyhow::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Runtime)
}

pub fn execute(cli: Cli) -> Result<Status, Failure> {
    if cli.jobs > 0 {
        // A second call in the same process (tests) keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Run(a) => cmd_run(&a, cli.jobs),
        Command::Spectra(a) => cmd_spectra(&a, cli.jobs),
        Command::Report(a) => cmd_report(&a),
    }
}

/// Parses `6-10`, `6,8,10` or mixtures such as `6,8-10`; sorted, deduplicated.
pub fn parse_sizes(text: &str) -> anyhow::Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once('-') {
            let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
            if a > b {
                bail!("empty size range `{part}`");
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().with_context(|| format!("bad size `{part}`"))?);
        }
    }
    if out.is_empty() {
        bail!("no sizes given");
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn cmd_gen(a: &GenArgs) -> Result<Status, Failure> {
    let sizes = config_err(parse_sizes(&a.sizes))?;
    let bank = config_err(generate_bank(&sizes, a.count, a.seed).map_err(Into::into))?;
    if bank.is_empty() {
        eprintln!("warning: count is 0, writing an empty bank");
    }
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        runtime_err(fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())))?;
    }
    runtime_err(save_instances(&bank, &a.out).map_err(Into::into))?;
    eprintln!("wrote {} instances to {}", bank.len(), a.out.display());
    Ok(Status::Success)
}

fn load_bank(s: &SweepArgs, sizes: &[usize]) -> Result<Vec<NppInstance>, Failure> {
    match &s.bank {
        Some(path) => config_err(load_instances(path).map_err(|e| anyhow!(e))),
        None => config_err(generate_bank(sizes, s.count, s.seed).map_err(Into::into)),
    }
}

fn base_config(s: &SweepArgs, jobs: usize) -> anyhow::Result<ExperimentConfig> {
    Ok(ExperimentConfig {
        sizes: parse_sizes(&s.sizes)?,
        instances_per_size: s.count,
        seed: s.seed,
        total_time: s.total_time,
        cutoff: s.cutoff,
        restarts: s.restarts,
        budget: s.budget,
        max_eval_per_start: s.max_eval,
        jobs,
        ..ExperimentConfig::default()
    })
}

#[derive(Serialize)]
struct Sidecar<'a> {
    command: &'a str,
    code_version: &'a str,
    bank: Option<String>,
    quasi_count_convention: &'a str,
    config: &'a ExperimentConfig,
}

fn write_sidecar(dir: &Path, name: &str, command: &str, bank: Option<&Path>, cfg: &ExperimentConfig) -> anyhow::Result<()> {
    let side = Sidecar {
        command,
        code_version: CODE_VERSION,
        bank: bank.map(|p| p.display().to_string()),
        quasi_count_convention: "n_quasi counts basis states with e_min < E <= e_min + delta; n_quasi_levels counts distinct energies",
        config: cfg,
    };
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(&side)? + "\n").with_context(|| format!("writing {}", path.display()))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_runs(path: &Path) -> anyhow::Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize::<RunCsv>()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(anyhow::Error::from)
                .and_then(RunCsv::into_record)
                .with_context(|| format!("{}: data row {}", path.display(), i + 1))
        })
        .collect()
}

fn prepare(s: &SweepArgs, cfg: &ExperimentConfig) -> Result<Vec<NppInstance>, Failure> {
    config_err(cfg.validate().map_err(Into::into))?;
    let bank = load_bank(s, &cfg.sizes)?;
    runtime_err(fs::create_dir_all(&s.out).with_context(|| format!("creating {}", s.out.display())))?;
    let used = bank.iter().filter(|i| cfg.sizes.contains(&i.n())).count();
    if used == 0 {
        eprintln!("warning: no bank instances match the requested sizes");
    }
    Ok(bank)
}

fn cmd_run(a: &RunArgs, jobs: usize) -> Result<Status, Failure> {
    let mut cfg = config_err(base_config(&a.sweep, jobs))?;
    cfg.algorithm = a.algo;
    cfg.p_min = a.p_min;
    cfg.p_max = a.p_max;
    let bank = prepare(&a.sweep, &cfg)?;
    let rows = run_sweep(&cfg, &bank);
    let dir = &a.sweep.out;
    let tag = a.algo.tag();
    runtime_err((|| {
        write_sidecar(dir, &format!("run-{tag}.json"), "run", a.sweep.bank.as_deref(), &cfg)?;
        write_csv(&dir.join(format!("runs-{tag}.csv")), &rows.iter().map(RunCsv::from).collect::<Vec<_>>())?;
        let aggs = aggregate(&rows);
        write_csv(&dir.join(format!("aggregates-{tag}.csv")), &aggs.iter().map(AggregateCsv::from).collect::<Vec<_>>())?;
        if a.algo.is_qaoa() {
            let m = min_depths(&aggs, SUCCESS_THRESHOLD);
            write_csv(&dir.join(format!("pmin-{tag}.csv")), &m.iter().map(MinDepthCsv::from).collect::<Vec<_>>())?;
        }
        Ok(())
    })())?;
    Ok(status_of(rows.iter().any(RunRecord::failed)))
}

fn status_of(partial: bool) -> Status {
    if partial {
        eprintln!("warning: some cells failed; see the `error` column");
        Status::Partial
    } else {
        Status::Success
    }
}

fn cmd_spectra(a: &SpectraArgs, jobs: usize) -> Result<Status, Failure> {
    let mut cfg = config_err(base_config(&a.sweep, jobs))?;
    cfg.delta = a.delta;
    cfg.grid_points = a.grid_points;
    if a.grid_points < nppqo::spectra::MIN_GRID_POINTS {
        return Err(Failure::Config(anyhow!(
            "--grid-points must be at least {}",
            nppqo::spectra::MIN_GRID_POINTS
        )));
    }
    if a.grid_points < GRID_WARN_BELOW {
        eprintln!("warning: {} grid points may not resolve the minimal gap; 201 is the converged default", a.grid_points);
    }
    let bank = prepare(&a.sweep, &cfg)?;
    let (runs, specs) = run_spectra(&cfg, &bank);
    let dir = &a.sweep.out;
    runtime_err((|| {
        write_sidecar(dir, "spectra.json", "spectra", a.sweep.bank.as_deref(), &cfg)?;
        write_csv(&dir.join("spectra.csv"), &specs.iter().map(SpectraCsv::from).collect::<Vec<_>>())?;
        write_csv(&dir.join("spectra-scatter.csv"), &specs.iter().map(ScatterCsv::from).collect::<Vec<_>>())?;
        write_csv(&dir.join("spectra-runs.csv"), &runs.iter().map(RunCsv::from).collect::<Vec<_>>())?;
        Ok(())
    })())?;
    let partial = runs.iter().any(RunRecord::failed) || specs.iter().any(|s: &SpectraRecord| s.error.is_some());
    Ok(status_of(partial))
}

fn cmd_report(a: &ReportArgs) -> Result<Status, Failure> {
    let entries = config_err(fs::read_dir(&a.out).with_context(|| format!("reading {}", a.out.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("runs-") && n.ends_with(".csv"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::Config(anyhow!("no runs-*.csv files in {}", a.out.display())));
    }
    let mut rows = Vec::new();
    for f in &files {
        rows.extend(config_err(read_runs(f))?);
    }
    sort_records(&mut rows);
    let aggs = aggregate(&rows);
    runtime_err((|| {
        write_csv(&a.out.join("report-aggregates.csv"), &aggs.iter().map(AggregateCsv::from).collect::<Vec<_>>())?;
        let m = min_depths(&aggs, SUCCESS_THRESHOLD);
        write_csv(&a.out.join("report-pmin.csv"), &m.iter().map(MinDepthCsv::from).collect::<Vec<_>>())?;
        let eff = efficiency_table(&rows);
        if eff.is_empty() {
            eprintln!("note: efficiency table needs both qaoa and qaoa-adaptive runs");
        }
        write_csv(&a.out.join("report-efficiency.csv"), &eff.iter().map(EfficiencyCsv::from).collect::<Vec<_>>())?;
        Ok(())
    })())?;
    Ok(status_of(rows.iter().any(RunRecord::failed)))
}
