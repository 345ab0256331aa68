//! `levy-edgeworth`: runs one named experiment from a TOML config and writes
//! a CSV (or text dump) headed by the config hash.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use levy_edgeworth::experiments::{self, ExperimentConfig, ExperimentKind, Output, Report};

#[derive(Parser, Debug)]
#[command(name = "levy-edgeworth", version, about = "Edgeworth, small-jump and SDE rate experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalized-sum distance to the Gaussian or perturbed normal, over m.
    CltRate(Common),
    /// Small-jump part against its Gaussian replacement, over ε.
    JumpCoupling(Common),
    /// Strong error of the coupled SDE schemes, over h = ε.
    SdeConvergence(Common),
    /// P_k, Q_k, u_k, p_k and self-checks for a cumulant file.
    EdgeworthBuild(Common),
    /// Cramér-condition probes on rescaled annuli.
    ProbeCramer(Common),
}

impl Command {
    fn split(&self) -> (ExperimentKind, &Common) {
        match self {
            Command::CltRate(c) => (ExperimentKind::CltRate, c),
            Command::JumpCoupling(c) => (ExperimentKind::JumpCoupling, c),
            Command::SdeConvergence(c) => (ExperimentKind::SdeConvergence, c),
            Command::EdgeworthBuild(c) => (ExperimentKind::EdgeworthBuild, c),
            Command::ProbeCramer(c) => (ExperimentKind::ProbeCramer, c),
        }
    }
}

#[derive(Args, Debug)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Output file, `-` for stdout. Overrides `output` in the config.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads for replicate parallelism.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Omit the `# generated=` header line.
    #[arg(long)]
    no_timestamp: bool,
    /// Overwrite an output written under a different config hash.
    #[arg(long)]
    force: bool,
}

enum Failure {
    Config(String),
    Numeric(String),
}

impl From<levy_edgeworth::Error> for Failure {
    fn from(e: levy_edgeworth::Error) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

const HASH_PREFIX: &str = "# config_hash=";

fn config_hash(cfg: &ExperimentConfig) -> Result<String, Failure> {
    let mut h = Sha256::new();
    h.update(cfg.canonical().as_bytes());
    if let Some(path) = &cfg.build.cumulants {
        let full = cfg.base_dir.join(path);
        let bytes = fs::read(&full).map_err(|e| Failure::Config(format!("cannot read {}: {e}", full.display())))?;
        h.update(b"\0cumulants\0");
        h.update(&bytes);
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

/// Refuses to replace a file unless it carries the same config hash.
fn check_overwrite(path: &Path, hash: &str, force: bool) -> Result<(), Failure> {
    if force || !path.exists() {
        return Ok(());
    }
    let existing = fs::read_to_string(path).unwrap_or_default();
    let found = existing.lines().find_map(|l| l.strip_prefix(HASH_PREFIX));
    match found {
        Some(h) if h == hash => Ok(()),
        Some(h) => Err(Failure::Config(format!(
            "{} was written with config hash {h}, current is {hash}; pass --force to overwrite",
            path.display()
        ))),
        None => Err(Failure::Config(format!(
            "{} exists and carries no config hash; pass --force to overwrite",
            path.display()
        ))),
    }
}

fn header(cfg: &ExperimentConfig, hash: &str, timestamp: bool, notes: &[String]) -> String {
    let mut s = format!("# experiment={}\n{HASH_PREFIX}{hash}\n", cfg.experiment.name());
    if timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        s.push_str(&format!("# generated={secs} (unix seconds)\n"));
    }
    for n in notes {
        s.push_str(&format!("# note: {n}\n"));
    }
    s
}

fn csv_body(report: &Report) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| Failure::Numeric(format!("csv encoding failed: {e}"));
    w.write_record(&report.table.columns).map_err(io_err)?;
    for row in &report.table.rows {
        w.write_record(row).map_err(io_err)?;
    }
    w.into_inner().map_err(|e| Failure::Numeric(format!("csv encoding failed: {e}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (kind, args) = cli.command.split();
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if cfg.experiment != kind {
        return Err(Failure::Config(format!(
            "config is for `{}` but subcommand is `{}`",
            cfg.experiment.name(),
            kind.name()
        )));
    }
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(Failure::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(format!("thread pool: {e}")))?;
    }
    let out: Option<PathBuf> = match args.out.clone().or_else(|| cfg.output.clone()) {
        Some(p) if p.as_os_str() == "-" => None,
        Some(p) if p.is_relative() && args.out.is_none() => Some(cfg.base_dir.join(p)),
        other => other,
    };
    let hash = config_hash(&cfg)?;
    if let Some(path) = &out {
        check_overwrite(path, &hash, args.force)?;
    }

    let (notes, body) = match experiments::run(&cfg)? {
        Output::Table(report) => (report.notes.clone(), csv_body(&report)?),
        Output::Text(text) => (Vec::new(), text.into_bytes()),
    };
    let mut bytes = header(&cfg, &hash, !args.no_timestamp, &notes).into_bytes();
    bytes.extend(body);
    match out {
        Some(path) => fs::write(&path, bytes).map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout().write_all(&bytes).map_err(|e| Failure::Config(format!("cannot write stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
