use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mosaic_core::config::{RunConfig, SweepConfig};
use mosaic_core::detect::{detect, Method};
use mosaic_core::experiment::{self, Manifest};
use mosaic_core::snapshot::aggregate;
use mosaic_core::{io, Error};

const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "mosaic", version, about = "Synthetic link streams with planted temporal communities")]
struct Cli {
    /// Worker threads; defaults to one per core. Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a scenario and its link stream: edges.csv, truth.json, manifest.json.
    Generate(Common),
    /// Cut a link stream into weighted snapshots: snapshots.csv, windows.csv.
    Aggregate(Inputs),
    /// Run detectors on the snapshots; writes labels_<method>.csv.
    Detect(Inputs),
    /// Score detectors against the ground truth: report.csv, window_nmi.csv.
    Evaluate(Inputs),
    /// Generate, detect and score over a grid of phi values and seeds.
    Sweep(Common),
    /// Check a ground-truth file, and optionally an edges file against it.
    Validate(ValidateArgs),
    /// Summary statistics of an edges file and its ground truth, as JSON.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Aggregation window length.
    #[arg(long, allow_negative_numbers = true)]
    window: Option<f64>,
    /// Comma-separated phi values for the sweep.
    #[arg(long, value_delimiter = ',')]
    phi: Option<Vec<f64>>,
    /// Comma-separated detector names.
    #[arg(long, value_delimiter = ',')]
    method: Option<Vec<Method>>,
}

#[derive(Debug, Args)]
struct Inputs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Also accepted: a run configuration to check.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    truth: PathBuf,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_usage() { EXIT_USAGE } else { EXIT_IO },
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| io_failure(path, e))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| io_failure(path, e))
}

/// Parse errors name the file they came from.
fn in_file<T>(path: &Path, r: mosaic_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| {
        let f = Failure::from(e);
        Failure {
            message: format!("{}: {}", path.display(), f.message),
            ..f
        }
    })
}

fn load_config(c: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = match &c.config {
        Some(path) => in_file(path, mosaic_core::config::parse_config_bytes(&read(path)?))?,
        None => RunConfig::default(),
    };
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &c.out {
        cfg.out = Some(out.clone());
    }
    if let Some(w) = c.window {
        cfg.window = w;
    }
    if let Some(phi) = &c.phi {
        cfg.sweep.get_or_insert_with(SweepConfig::default).phi = phi.clone();
    }
    if let Some(methods) = &c.method {
        cfg.select_methods(methods);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf, Failure> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
    Ok(dir)
}

fn load_inputs(
    edges: &Path,
    truth: &Path,
) -> Result<(mosaic_core::MosaicPartition, mosaic_core::LinkStream), Failure> {
    let p = in_file(truth, io::parse_truth_bytes(&read(truth)?))?;
    let parsed = in_file(edges, io::parse_edges_bytes(&read(edges)?))?;
    let ls = in_file(edges, mosaic_core::LinkStream::new(p.num_nodes(), p.domain(), parsed))?;
    Ok((p, ls))
}

fn generate(c: &Common) -> Result<(), Failure> {
    let cfg = load_config(c)?;
    let b = experiment::generate(&cfg)?;
    let dir = out_dir(&cfg)?;
    experiment::write_benchmark(&dir, &cfg, &b).map_err(|e| Failure {
        message: format!("{}: {e}", dir.display()),
        ..Failure::from(e)
    })?;
    let m = Manifest::new(&cfg, &b);
    eprintln!(
        "{} communities, {} edges -> {}",
        m.stats.communities,
        m.stats.edges,
        dir.display()
    );
    for w in &b.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn aggregate_cmd(i: &Inputs) -> Result<(), Failure> {
    let cfg = load_config(&i.common)?;
    let (_, ls) = load_inputs(&i.edges, &i.truth)?;
    let snaps = aggregate(&ls, cfg.window)?;
    let dir = out_dir(&cfg)?;
    write(&dir.join("snapshots.csv"), &io::snapshots_to_string(&snaps))?;
    write(&dir.join("windows.csv"), &io::windows_to_string(&snaps))?;
    Ok(())
}

fn detect_cmd(i: &Inputs) -> Result<(), Failure> {
    let cfg = load_config(&i.common)?;
    let (_, ls) = load_inputs(&i.edges, &i.truth)?;
    let snaps = aggregate(&ls, cfg.window)?;
    let dir = out_dir(&cfg)?;
    for d in cfg.detector_configs() {
        let found = detect(&snaps, &d)?;
        write(&dir.join(format!("labels_{}.csv", d.method)), &io::labels_to_string(&found))?;
    }
    Ok(())
}

fn evaluate_cmd(i: &Inputs) -> Result<(), Failure> {
    let cfg = load_config(&i.common)?;
    let (p, ls) = load_inputs(&i.edges, &i.truth)?;
    let rows = experiment::evaluate(&p, &ls, cfg.window, &cfg.detector_configs(), true)?;
    let report = experiment::report_to_string(&rows);
    let dir = out_dir(&cfg)?;
    write(&dir.join(experiment::REPORT_FILE), &report)?;
    write(&dir.join(experiment::WINDOW_NMI_FILE), &experiment::window_nmi_to_string(&rows))?;
    print!("{report}");
    Ok(())
}

fn sweep_cmd(c: &Common) -> Result<(), Failure> {
    let mut cfg = load_config(c)?;
    cfg.sweep.get_or_insert_with(SweepConfig::default);
    let rows = experiment::sweep(&cfg)?;
    let summary = experiment::summarize(&rows);
    let dir = out_dir(&cfg)?;
    write(&dir.join(experiment::SWEEP_FILE), &experiment::sweep_to_string(&rows))?;
    let summary = experiment::summary_to_string(&summary);
    write(&dir.join(experiment::SUMMARY_FILE), &summary)?;
    print!("{summary}");
    Ok(())
}

fn validate_cmd(v: &ValidateArgs) -> Result<(), Failure> {
    if v.truth.is_none() && v.config.is_none() {
        return Err(Failure {
            code: EXIT_USAGE,
            message: "nothing to validate: pass --truth and/or --config".into(),
        });
    }
    if let Some(path) = &v.config {
        in_file(path, mosaic_core::config::parse_config_bytes(&read(path)?))?;
        println!("{}: ok", path.display());
    }
    let Some(truth) = &v.truth else {
        return Ok(());
    };
    let file = in_file(truth, io::parse_truth_file(std::str::from_utf8(&read(truth)?).map_err(|_| {
        Failure {
            code: EXIT_USAGE,
            message: format!("{}: invalid UTF-8", truth.display()),
        }
    })?))?;
    let p = in_file(truth, file.to_partition_unchecked())?;
    let report = p.validate();
    for w in &report.warnings {
        println!("{}: warning: {w}", truth.display());
    }
    if !report.is_ok() {
        for violation in &report.violations {
            println!("{}: {violation}", truth.display());
        }
        return Err(Failure {
            code: EXIT_USAGE,
            message: format!("{}: {} violation(s)", truth.display(), report.violations.len()),
        });
    }
    println!("{}: ok, {} mosaics", truth.display(), p.mosaics().len());
    if let Some(edges) = &v.edges {
        let text = read(edges)?;
        let parsed = in_file(edges, io::parse_edges_bytes(&text))?;
        let ls = in_file(edges, mosaic_core::LinkStream::new(p.num_nodes(), p.domain(), parsed))?;
        if io::edges_to_string(ls.edges()).as_bytes() != text.as_slice() {
            println!("{}: note: not in canonical form", edges.display());
        }
        let s = experiment::stream_stats(&p, &ls);
        if s.empty_edges > 0 {
            println!("{}: note: {} edges touch the empty community", edges.display(), s.empty_edges);
        }
        println!("{}: ok, {} edges", edges.display(), ls.len());
    }
    Ok(())
}

fn stats_cmd(s: &StatsArgs) -> Result<(), Failure> {
    let (p, ls) = load_inputs(&s.edges, &s.truth)?;
    let stats = experiment::stream_stats(&p, &ls);
    println!("{}", serde_json::to_string_pretty(&stats).expect("stats serialise"));
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure {
                code: EXIT_USAGE,
                message: format!("--threads: {e}"),
            })?;
    }
    match &cli.command {
        Command::Generate(c) => generate(c),
        Command::Aggregate(i) => aggregate_cmd(i),
        Command::Detect(i) => detect_cmd(i),
        Command::Evaluate(i) => evaluate_cmd(i),
        Command::Sweep(c) => sweep_cmd(c),
        Command::Validate(v) => validate_cmd(v),
        Command::Stats(s) => stats_cmd(s),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
